#include "gca/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "gca/error.hpp"
#include "gca/parallel.hpp"

namespace gca {

std::vector<BruteForceEntry> bruteforce_nx(const Network& net, std::size_t x, const VerifyOptions& options,
                                           std::size_t threads) {
  if (x != 1 && x != 2) throw std::invalid_argument(fmt::format("brute force supports x = 1 or 2, got {}", x));
  std::vector<BranchIndex> in_service;
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (net.branches()[i].in_service) in_service.push_back(i);
  }
  const double n = static_cast<double>(in_service.size());
  const double combos = x == 1 ? n : n * (n - 1) / 2;
  if (combos > kBruteForceLimit) {
    throw Error(fmt::format("brute force refused: {} choose {} = {:.0f} subsets exceeds the limit of {:.0f}",
                            in_service.size(), x, combos, kBruteForceLimit));
  }

  std::vector<std::vector<BranchIndex>> subsets;
  subsets.reserve(static_cast<std::size_t>(combos));
  for (std::size_t a = 0; a < in_service.size(); ++a) {
    if (x == 1) {
      subsets.push_back({in_service[a]});
      continue;
    }
    for (std::size_t b = a + 1; b < in_service.size(); ++b) subsets.push_back({in_service[a], in_service[b]});
  }

  std::vector<std::optional<ViolationReport>> reports(subsets.size());
  parallel_for(subsets.size(), threads, [&](std::size_t i) {
    ViolationReport r = verify_candidate(net, subsets[i], options);
    if (r.kind != ViolationKind::None) reports[i] = std::move(r);
  });

  struct Keyed {
    std::vector<BranchKey> keys;
    BruteForceEntry entry;
  };
  std::vector<Keyed> found;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    if (!reports[i]) continue;
    Keyed k;
    for (BranchIndex b : subsets[i]) k.keys.push_back(net.branch_key(b));
    std::sort(k.keys.begin(), k.keys.end());
    k.entry = {subsets[i], std::move(*reports[i])};
    found.push_back(std::move(k));
  }
  std::sort(found.begin(), found.end(), [](const Keyed& a, const Keyed& b) {
    if (a.entry.report.overflows.size() != b.entry.report.overflows.size()) {
      return a.entry.report.overflows.size() > b.entry.report.overflows.size();
    }
    return a.keys < b.keys;
  });
  std::vector<BruteForceEntry> out;
  out.reserve(found.size());
  for (auto& k : found) out.push_back(std::move(k.entry));
  return out;
}

namespace {

constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);

// Lists every shortest path from each source by depth-first walking the
// distance layers. For every unordered pair {s,t} it reports how many
// shortest paths there are and how many satisfy `hit`.
template <typename Hit>
double enumerate_pair_fractions(const Multigraph& g, Hit&& hit) {
  const std::size_t n = g.node_count();
  if (n > kNaiveNodeLimit) {
    throw std::invalid_argument(fmt::format("naive enumeration limited to {} nodes, graph has {}", kNaiveNodeLimit, n));
  }
  double total = 0.0;
  std::vector<std::size_t> path;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, kUnreached);
    std::vector<std::size_t> queue{s};
    dist[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      for (const auto& inc : g.incident(queue[h])) {
        if (dist[inc.neighbor] == kUnreached) {
          dist[inc.neighbor] = dist[queue[h]] + 1;
          queue.push_back(inc.neighbor);
        }
      }
    }
    std::vector<double> paths(n, 0.0), hits(n, 0.0);
    auto walk = [&](auto&& self, std::size_t v) -> void {
      if (v != s) {
        paths[v] += 1.0;
        if (hit(std::span<const std::size_t>(path))) hits[v] += 1.0;
      }
      for (const auto& inc : g.incident(v)) {
        if (dist[inc.neighbor] != dist[v] + 1) continue;
        path.push_back(inc.edge);
        self(self, inc.neighbor);
        path.pop_back();
      }
    };
    walk(walk, s);
    for (std::size_t t = s + 1; t < n; ++t) {
      if (paths[t] > 0.0) total += hits[t] / paths[t];
    }
  }
  return total;
}

}  // namespace

double naive_betweenness(const Multigraph& g, EdgeId e) {
  const std::size_t pos = g.edge_position(e);
  return enumerate_pair_fractions(g, [pos](std::span<const std::size_t> path) {
    return std::find(path.begin(), path.end(), pos) != path.end();
  });
}

double naive_gbc(const Multigraph& g, const EdgeGroup& group) {
  std::vector<bool> member(g.edge_count(), false);
  for (EdgeId e : group.edges()) member[g.edge_position(e)] = true;
  return enumerate_pair_fractions(g, [&](std::span<const std::size_t> path) {
    return std::any_of(path.begin(), path.end(), [&](std::size_t p) { return member[p]; });
  });
}

}  // namespace gca
