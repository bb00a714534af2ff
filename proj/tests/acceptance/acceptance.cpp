// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "gca/dcpf.hpp"
#include "gca/graph.hpp"
#include "gca/oracle.hpp"
#include "gca/screening.hpp"
#include "gca/verify.hpp"

namespace {

using namespace gca;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kCentralityTolerance = 1e-9;
constexpr double kCentralityBudgetS = 60.0;
constexpr int kRandomGraphs = 1000;
constexpr double kLodfRelTolerance = 1e-6;
constexpr double kLodfBudgetS = 120.0;
constexpr double kSpeedupFactor = 3.0;
constexpr double kShapeSpreadLimit = 2.0;
constexpr double kBenchBudgetS = 1800.0;
constexpr std::size_t kBenchReps = 31;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<BranchKey> sorted_keys(const Network& net, std::span<const BranchIndex> branches) {
  std::vector<BranchKey> keys;
  for (BranchIndex b : branches) keys.push_back(net.branch_key(b));
  std::sort(keys.begin(), keys.end());
  return keys;
}

const Network& activsg200() {
  static const Network net = load_case(testing::data_path("case_ACTIVSg200.m"));
  return net;
}

std::vector<std::pair<std::string, Network>> test_networks() {
  std::vector<std::pair<std::string, Network>> nets{{"triangle", testing::triangle()},
                                                    {"six-bus bridge", testing::six_bus_with_bridge()},
                                                    {"six-bus mesh", testing::six_bus_mesh()},
                                                    {"barbell", testing::barbell()}};
  for (const char* name : {"case9.m", "case30.m", "case118.m", "case_ACTIVSg200.m"}) {
    nets.emplace_back(name, load_case(testing::data_path(name)));
  }
  return nets;
}

Verdict centrality_oracle() {
  const auto start = Clock::now();
  std::mt19937 rng(20240601);
  double worst = 0.0;
  std::size_t edges = 0, groups = 0;
  for (int trial = 0; trial < kRandomGraphs; ++trial) {
    const Multigraph g = testing::random_multigraph(rng, 12, 20);
    const auto fast = edge_betweenness_all(g);
    for (std::size_t pos = 0; pos < g.edge_count(); ++pos) {
      worst = std::max(worst, std::abs(fast[pos] - naive_betweenness(g, g.edges()[pos].id)));
      ++edges;
    }
    std::vector<EdgeId> ids;
    for (const auto& e : g.edges()) ids.push_back(e.id);
    for (std::size_t size = 1; size <= std::min<std::size_t>(ids.size(), 4); ++size) {
      std::shuffle(ids.begin(), ids.end(), rng);
      const EdgeGroup group(g, {ids.begin(), ids.begin() + static_cast<long>(size)});
      worst = std::max(worst, std::abs(group_betweenness(g, group) - naive_gbc(g, group)));
      ++groups;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= kCentralityTolerance && elapsed < kCentralityBudgetS,
          fmt::format("{} graphs, {} edges, {} groups, max |diff| {:.3g}, {:.2f} s", kRandomGraphs, edges, groups,
                      worst, elapsed)};
}

Verdict lodf_oracle() {
  bool pass = true;
  std::string detail;
  for (const auto& [name, net] : test_networks()) {
    const auto start = Clock::now();
    const auto check = testing::check_lodf_against_resolve(net);
    const double elapsed = seconds_since(start);
    const bool ok = check.columns > 0 && check.worst <= kLodfRelTolerance && elapsed < kLodfBudgetS;
    pass = pass && ok;
    detail += fmt::format("{}{}: {} cols, worst {:.2g}, {:.2f} s", detail.empty() ? "" : "; ", name, check.columns,
                          check.worst, elapsed);
  }
  return {pass, detail};
}

Verdict islanding_is_bridge() {
  bool pass = true;
  std::size_t branches = 0, flagged = 0;
  auto nets = test_networks();
  nets.emplace_back("case_ACTIVSg500.m", load_case(testing::data_path("case_ACTIVSg500.m")));
  for (const auto& [name, net] : nets) {
    const LodfMatrix lodf = compute_lodf(net);
    const auto cut = bridges(Multigraph::from_network(net));
    for (BranchIndex i = 0; i < net.branch_count(); ++i) {
      if (!lodf.active[i]) continue;
      ++branches;
      const bool bridge = std::binary_search(cut.begin(), cut.end(), i);
      if (lodf.islanding_column(i) != bridge) pass = false;
      if (lodf.islanding_column(i)) {
        ++flagged;
        if (nlodf_metric(lodf, i) != 1.0) pass = false;
      }
    }
  }
  return {pass, fmt::format("{} networks, {} branches, {} islanding columns", nets.size(), branches, flagged)};
}

Verdict worked_values() {
  LodfMatrix lodf;
  lodf.entries = Eigen::MatrixXd::Zero(4, 4);
  lodf.entries(0, 0) = -1.0;
  lodf.entries(1, 0) = 0.2;
  lodf.entries(2, 0) = -0.4;
  lodf.entries(3, 0) = 0.6;
  lodf.islanding.assign(4, false);
  lodf.active.assign(4, true);
  const double raw = nlodf_raw(lodf, 0);
  const double capped = nlodf_metric(lodf, 0);
  const ScoreTable t = importance_metric({{0, 0.4}, {1, 3.0}}, {{0, 100.0}, {1, 50.0}});
  const bool pass = std::abs(raw - 2.449489742783178) < 1e-12 && capped == 1.0 && t.at(0).m == 40.0 &&
                    t.at(1).m == 50.0;
  return {pass, fmt::format("raw {:.6f} -> {}, 100 x 0.4 = {}, 50 x min(3,1) = {}", raw, capped, t.at(0).m,
                            t.at(1).m)};
}

struct BruteForceRun {
  std::vector<BruteForceEntry> entries;
  double seconds = 0.0;
};

const BruteForceRun& bruteforce_pairs() {
  static const BruteForceRun run = [] {
    BruteForceRun r;
    const auto start = Clock::now();
    r.entries = bruteforce_nx(activsg200(), 2);
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

Verdict published_pair() {
  const Network& net = activsg200();
  ScreeningConfig cfg;
  cfg.x = 2;
  const std::vector<std::size_t> levels{1, 2, 3, 4, 5, 6, 7, 8};
  const ScreeningResult sweep = screen_sweep(net, cfg, levels);
  std::set<std::vector<BranchKey>> screened;
  for (const auto& c : sweep.candidates) screened.insert(sorted_keys(net, c.branches));

  const std::vector<BranchKey> published{{135, 133, "1"}, {136, 133, "1"}};
  std::size_t rank = 0;
  std::string levels_found;
  for (std::size_t i = 0; i < sweep.candidates.size(); ++i) {
    if (sorted_keys(net, sweep.candidates[i].branches) == published) {
      rank = i + 1;
      levels_found = fmt::format("{}", fmt::join(sweep.candidates[i].search_levels, ","));
    }
  }

  const auto& brute = bruteforce_pairs();
  std::size_t overflow_pairs = 0, covered = 0, islanding = 0;
  for (const auto& e : brute.entries) {
    if (e.report.kind == ViolationKind::Islanding) ++islanding;
    if (e.report.kind != ViolationKind::Overflow) continue;
    ++overflow_pairs;
    if (screened.count(sorted_keys(net, e.branches))) ++covered;
  }
  const bool pass = rank > 0 && covered == overflow_pairs;
  std::string detail = rank > 0 ? fmt::format("pair 135-133-1 + 136-133-1 at rank {} of {} (levels {})", rank,
                                              sweep.candidates.size(), levels_found)
                                : fmt::format("pair 135-133-1 + 136-133-1 missing from {} candidates",
                                              sweep.candidates.size());
  detail += fmt::format("; brute force: {} violating pairs, {} islanding, {} DC-overflow pairs, {} covered",
                        brute.entries.size(), islanding, overflow_pairs, covered);
  if (overflow_pairs == 0) detail += " (no DC-overflow pair exists on this case, so coverage holds vacuously)";
  return {pass, detail};
}

Verdict speedup() {
  const Network& net = activsg200();
  ScreeningConfig cfg;
  cfg.x = 2;
  cfg.search_level = 3;
  std::vector<double> times;
  for (int rep = 0; rep < 5; ++rep) {
    const auto start = Clock::now();
    const auto r = screen(net, cfg);
    times.push_back(seconds_since(start));
    if (r.candidates.empty()) return {false, "screen produced no candidates"};
  }
  std::sort(times.begin(), times.end());
  const double screen_s = times[times.size() / 2];
  const double brute_s = bruteforce_pairs().seconds;
  return {screen_s <= brute_s / kSpeedupFactor,
          fmt::format("screen {:.4f} s vs brute force {:.3f} s, ratio {:.0f}x", screen_s, brute_s, brute_s / screen_s)};
}

Verdict runtime_shape() {
  const Network& net = activsg200();
  const std::vector<std::size_t> xs{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<std::size_t> levels{1, 2, 3, 4, 5, 6, 7, 8};
  const auto start = Clock::now();
  const auto cells = cli::bench(net, xs, levels, kBenchReps, ScreeningConfig{});
  const double elapsed = seconds_since(start);
  auto median = [&](std::size_t x, std::size_t level) {
    for (const auto& c : cells) {
      if (c.x == x && c.search_level == level) return c.median_ms;
    }
    return std::nan("");
  };
  double worst_spread = 0.0;
  std::size_t worst_spread_level = 0;
  for (std::size_t level : levels) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t x : xs) {
      lo = std::min(lo, median(x, level));
      hi = std::max(hi, median(x, level));
    }
    if (hi / lo > worst_spread) {
      worst_spread = hi / lo;
      worst_spread_level = level;
    }
  }
  std::vector<std::string> inversions;
  for (std::size_t x : xs) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
      const double a = median(x, levels[i - 1]), b = median(x, levels[i]);
      if (b < a) inversions.push_back(fmt::format("x={} L{}->L{} {:.3f}->{:.3f} ms", x, levels[i - 1], levels[i], a, b));
    }
  }
  std::string growth;
  for (std::size_t level : levels) growth += fmt::format("{}{:.2f}", growth.empty() ? "" : " ", median(2, level));
  std::string detail = fmt::format("{} cells x {} reps in {:.1f} s; max spread across x {:.2f}x (level {}); x=2 "
                                   "medians by level [ms]: {}",
                                   cells.size(), kBenchReps, elapsed, worst_spread, worst_spread_level, growth);
  if (!inversions.empty()) detail += fmt::format("; non-monotone: {}", fmt::join(inversions, "; "));
  return {cells.size() == 64 && worst_spread < kShapeSpreadLimit && inversions.empty() && elapsed < kBenchBudgetS,
          detail};
}

std::string run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return fmt::format("exit {}\n{}", code, out.str());
}

// Drops the timing columns (median, min, max) of a bench table.
std::string bench_without_timings(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, kept;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 7) {
      kept += line + "\n";
      continue;
    }
    kept += fmt::format("{},{},{},{}\n", cols[0], cols[1], cols[2], cols[6]);
  }
  return kept;
}

Verdict determinism() {
  const std::string case200 = testing::data_path("case_ACTIVSg200.m");
  const std::string case30 = testing::data_path("case30.m");
  const auto seq = std::filesystem::temp_directory_path() / "gca_acceptance_sequence.txt";
  {
    std::ofstream f(seq);
    f << "136-133-1\n135-133-1\n125-123-1\n";
  }
  const std::vector<std::vector<std::string>> commands{
      {"dump", case200},
      {"lodf", case200},
      {"screen", case200, "--x", "2", "--search-level", "3"},
      {"screen", case200, "--x", "4", "--search-level", "1-8"},
      {"screen", case200, "--x", "2", "--format", "csv"},
      {"verify", case200, "--contingency", "136-133-1,135-133-1"},
      {"bruteforce", case30, "--x", "2"},
      {"stability", case200, "--sequence", seq.string()},
      {"bench", case30, "--x", "1-2", "--search-level", "1-2", "--reps", "3"},
  };
  std::vector<std::string> differing;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4", "4"}) {
      auto args = cmd;
      args.insert(args.end(), {"--threads", threads});
      std::string out = run_cli(args);
      if (cmd[0] == "bench") out = bench_without_timings(out);
      outputs.push_back(std::move(out));
    }
    if (outputs[0].rfind("exit 0\n", 0) != 0 ||
        !std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) { return o == outputs[0]; })) {
      differing.push_back(cmd[0]);
    }
  }
  std::filesystem::remove(seq);
  return {differing.empty(),
          differing.empty() ? fmt::format("{} invocations x 4 runs (threads 1,1,4,4) byte-identical; bench compared "
                                          "without its timing columns",
                                          commands.size())
                            : fmt::format("differing: {}", fmt::join(differing, ", "))};
}

Verdict stability_report() {
  const Network& net = activsg200();
  std::vector<BranchIndex> sequence;
  for (const char* key : {"136-133-1", "135-133-1", "125-123-1", "126-123-1", "127-123-1", "124-123-1", "134-133-1",
                          "30-29-1"}) {
    sequence.push_back(net.branch_index(BranchKey::parse(key)));
  }
  const StabilityReport r = lodf_stability_report(net, sequence);
  std::vector<std::string> rho;
  for (double v : r.rank_correlation) rho.push_back(fmt::format("{:.4f}", v));
  const bool pass = r.values.size() == r.applied.size() + 1 && r.rank_correlation.size() == r.applied.size() &&
                    !r.applied.empty();
  return {pass, fmt::format("{} of {} outages applied; consecutive-step Spearman rho: {}{}", r.applied.size(),
                            sequence.size(), fmt::join(rho, " "),
                            r.notices.empty() ? "" : fmt::format("; notices: {}", fmt::join(r.notices, " | ")))};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  // Truncation notices from the CLI runs would interleave with the verdicts.
  setenv("GCA_LOG", "error", 0);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"centrality matches naive enumeration", centrality_oracle},
      {"LODF matches per-outage re-solve", lodf_oracle},
      {"islanding flag equals bridge status", islanding_is_bridge},
      {"NLODF and importance worked values", worked_values},
      {"published N-2 pair found by level sweep", published_pair},
      {"screening at least 3x faster than brute force", speedup},
      {"runtime shape across x and search level", runtime_shape},
      {"byte-identical CLI output across runs and threads", determinism},
      {"LODF stability report on 8-step sequence", stability_report},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    failures += v.pass ? 0 : 1;
    std::cout << fmt::format("{} [{}] {}: {}", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - static_cast<std::size_t>(failures),
                           criteria.size())
            << std::endl;
  return failures == 0 ? 0 : 1;
}
