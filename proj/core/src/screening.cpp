#include "gca/screening.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gca/error.hpp"
#include "gca/parallel.hpp"

namespace gca {
namespace {

// Ranking compares quantized values so that last-bit noise from a different
// assembly order cannot flip a tie.
double quantize(double v, double resolution) { return std::round(v / resolution); }

constexpr double kMwResolution = 1e-6;
constexpr double kScoreResolution = 1e-9;

std::vector<BranchKey> sorted_keys(const Network& net, std::span<const BranchIndex> branches) {
  std::vector<BranchKey> keys;
  keys.reserve(branches.size());
  for (BranchIndex b : branches) keys.push_back(net.branch_key(b));
  std::sort(keys.begin(), keys.end());
  return keys;
}

Neighborhood make_neighborhood(const Network& net, const Multigraph& graph, BranchIndex seed, std::size_t level) {
  const std::array<NodeId, 2> ends{net.from_index(seed), net.to_index(seed)};
  Neighborhood nbhd;
  nbhd.seed = seed;
  nbhd.nodes = khop_nodes(graph, ends, level);
  nbhd.subgraph = graph.induced(nbhd.nodes);
  return nbhd;
}

}  // namespace

void ScreeningConfig::validate() const {
  if (x == 0) throw std::invalid_argument("contingency order x must be positive");
  if (!(top_percent > 0.0 && top_percent <= 100.0)) {
    throw std::invalid_argument(fmt::format("top percent must be in (0, 100], got {}", top_percent));
  }
  if (!(nlodf_saturation > 0.0)) throw std::invalid_argument("NLODF saturation must be positive");
  if (threads == 0) throw std::invalid_argument("thread count must be positive");
}

double nlodf_raw(const LodfMatrix& lodf, BranchIndex i) {
  if (i >= lodf.size() || !lodf.active[i]) throw LookupError(fmt::format("branch {} has no LODF column", i));
  if (lodf.islanding[i]) return 1.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (BranchIndex k = 0; k < lodf.size(); ++k) {
    if (k == i || !lodf.active[k]) continue;
    sum += std::abs(lodf.at(k, i));
    ++count;
  }
  if (count == 0) return 1.0;
  const double mean = sum / static_cast<double>(count);
  double var = 0.0;
  for (BranchIndex k = 0; k < lodf.size(); ++k) {
    if (k == i || !lodf.active[k]) continue;
    const double d = std::abs(lodf.at(k, i)) - mean;
    var += d * d;
  }
  const double std_dev = std::sqrt(var / static_cast<double>(count));
  if (std_dev < 1e-12) return 1.0;
  return mean / std_dev;
}

double nlodf_metric(const LodfMatrix& lodf, BranchIndex i) { return std::min(nlodf_raw(lodf, i), 1.0); }

ScoreTable importance_metric(const std::map<BranchIndex, double>& nlodf,
                             const std::map<BranchIndex, double>& flows_mw, double nlodf_saturation) {
  ScoreTable table;
  for (const auto& [branch, value] : nlodf) {
    auto flow = flows_mw.find(branch);
    if (flow == flows_mw.end()) throw LookupError(fmt::format("no pre-outage flow for branch {}", branch));
    const double weight = value >= nlodf_saturation ? 1.0 : value;
    table.emplace(branch, BranchScore{branch, flow->second, weight, std::abs(flow->second) * weight});
  }
  return table;
}

bool ranks_before(const Network& net, const BranchScore& a, const BranchScore& b) {
  const double ma = quantize(a.m, kMwResolution), mb = quantize(b.m, kMwResolution);
  if (ma != mb) return ma > mb;
  const double fa = quantize(std::abs(a.flow_mw), kMwResolution), fb = quantize(std::abs(b.flow_mw), kMwResolution);
  if (fa != fb) return fa > fb;
  return net.branch_key(a.branch) < net.branch_key(b.branch);
}

std::vector<BranchIndex> select_investigated_branches(const Network& net, const ScoreTable& scores,
                                                      const ScreeningConfig& cfg) {
  std::vector<BranchScore> ordered;
  ordered.reserve(scores.size());
  for (const auto& [_, s] : scores) ordered.push_back(s);
  std::sort(ordered.begin(), ordered.end(),
            [&](const BranchScore& a, const BranchScore& b) { return ranks_before(net, a, b); });
  const double share = cfg.top_percent * static_cast<double>(ordered.size()) / 100.0;
  auto keep = static_cast<std::size_t>(std::ceil(share - 1e-9));
  keep = std::clamp<std::size_t>(keep, ordered.empty() ? 0 : 1, ordered.size());
  std::vector<BranchIndex> result;
  result.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) result.push_back(ordered[i].branch);
  return result;
}

std::vector<Neighborhood> build_neighborhoods(const Network& net, const Multigraph& graph,
                                              std::span<const BranchIndex> investigated,
                                              std::size_t search_level) {
  std::vector<Neighborhood> out;
  out.reserve(investigated.size());
  for (BranchIndex seed : investigated) out.push_back(make_neighborhood(net, graph, seed, search_level));
  return out;
}

std::optional<ContingencyCandidate> importance_subgraph(const Network& net, const Neighborhood& nbhd,
                                                        const ScoreTable& scores,
                                                        const ScreeningConfig& cfg) {
  const Multigraph& sg = nbhd.subgraph;
  if (sg.edge_count() < cfg.x) {
    spdlog::info("skipping neighborhood of {}: {} branches, need {}", net.branch_key(nbhd.seed).to_string(),
                 sg.edge_count(), cfg.x);
    return std::nullopt;
  }
  std::vector<BranchScore> ranked;
  ranked.reserve(sg.edge_count());
  for (const auto& e : sg.edges()) {
    auto it = scores.find(e.id);
    if (it == scores.end()) throw LookupError(fmt::format("no importance score for branch {}", e.id));
    ranked.push_back(it->second);
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(cfg.x), ranked.end(),
                    [&](const BranchScore& a, const BranchScore& b) { return ranks_before(net, a, b); });

  ContingencyCandidate cand;
  cand.seed = nbhd.seed;
  cand.neighborhood_buses = sg.node_count();
  cand.neighborhood_branches = sg.edge_count();
  cand.search_levels = {cfg.search_level};
  for (std::size_t i = 0; i < cfg.x; ++i) cand.branches.push_back(ranked[i].branch);

  const EdgeGroup group(sg, cand.branches);
  cand.gbc_score = cfg.gbc_mode == GbcMode::Exact ? group_betweenness(sg, group)
                                                  : representative_path_score(sg, group);
  return cand;
}

ScreeningInputs prepare_screening(const Network& net, double nlodf_saturation) {
  ScreeningInputs in;
  in.flows_mw = solve_dc(net).flows_mw;
  in.lodf = compute_lodf(net);
  in.graph = Multigraph::from_network(net);
  std::map<BranchIndex, double> nlodf, flows;
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!in.lodf.active[i]) continue;
    nlodf.emplace(i, nlodf_raw(in.lodf, i));
    flows.emplace(i, in.flows_mw[i]);
  }
  in.scores = importance_metric(nlodf, flows, nlodf_saturation);
  return in;
}

void rank_candidates(const Network& net, std::vector<ContingencyCandidate>& candidates) {
  std::vector<std::pair<std::vector<BranchKey>, std::size_t>> order;
  order.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) order.emplace_back(sorted_keys(net, candidates[i].branches), i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    const double sa = quantize(candidates[a.second].gbc_score, kScoreResolution);
    const double sb = quantize(candidates[b.second].gbc_score, kScoreResolution);
    if (sa != sb) return sa > sb;
    return a.first < b.first;
  });
  std::vector<ContingencyCandidate> sorted;
  sorted.reserve(candidates.size());
  for (const auto& [_, i] : order) sorted.push_back(std::move(candidates[i]));
  candidates = std::move(sorted);
}

namespace {

// Folds `incoming` into `merged`, one entry per branch set. The best score
// wins; on equal scores the entry seen first is kept.
void merge_candidates(const Network& net, std::map<std::vector<BranchKey>, ContingencyCandidate>& merged,
                      ContingencyCandidate incoming) {
  auto key = sorted_keys(net, incoming.branches);
  auto [it, inserted] = merged.try_emplace(std::move(key), incoming);
  if (inserted) return;
  ContingencyCandidate& kept = it->second;
  std::vector<std::size_t> levels = kept.search_levels;
  levels.insert(levels.end(), incoming.search_levels.begin(), incoming.search_levels.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (quantize(incoming.gbc_score, kScoreResolution) > quantize(kept.gbc_score, kScoreResolution)) {
    kept = std::move(incoming);
  }
  kept.search_levels = std::move(levels);
}

}  // namespace

ScreeningResult screen(const Network& net, const ScreeningInputs& inputs, const ScreeningConfig& cfg) {
  cfg.validate();
  ScreeningResult result;
  result.investigated = select_investigated_branches(net, inputs.scores, cfg);

  std::vector<std::optional<ContingencyCandidate>> found(result.investigated.size());
  parallel_for(result.investigated.size(), cfg.threads, [&](std::size_t i) {
    const Neighborhood nbhd = make_neighborhood(net, inputs.graph, result.investigated[i], cfg.search_level);
    found[i] = importance_subgraph(net, nbhd, inputs.scores, cfg);
  });

  std::map<std::vector<BranchKey>, ContingencyCandidate> merged;
  for (auto& cand : found) {
    if (!cand) {
      ++result.skipped;
      continue;
    }
    merge_candidates(net, merged, std::move(*cand));
  }
  for (auto& [_, cand] : merged) result.candidates.push_back(std::move(cand));
  rank_candidates(net, result.candidates);
  return result;
}

ScreeningResult screen(const Network& net, const ScreeningConfig& cfg) {
  cfg.validate();
  return screen(net, prepare_screening(net, cfg.nlodf_saturation), cfg);
}

ScreeningResult screen_sweep(const Network& net, const ScreeningConfig& cfg, std::span<const std::size_t> levels) {
  cfg.validate();
  if (levels.empty()) throw std::invalid_argument("search level sweep is empty");
  const ScreeningInputs inputs = prepare_screening(net, cfg.nlodf_saturation);
  ScreeningResult result;
  std::map<std::vector<BranchKey>, ContingencyCandidate> merged;
  for (std::size_t level : levels) {
    ScreeningConfig level_cfg = cfg;
    level_cfg.search_level = level;
    ScreeningResult one = screen(net, inputs, level_cfg);
    result.investigated = one.investigated;
    result.skipped += one.skipped;
    for (auto& cand : one.candidates) merge_candidates(net, merged, std::move(cand));
  }
  for (auto& [_, cand] : merged) result.candidates.push_back(std::move(cand));
  rank_candidates(net, result.candidates);
  return result;
}

}  // namespace gca
