#pragma once

#include <cstddef>
#include <vector>

#include "gca/graph.hpp"
#include "gca/network.hpp"
#include "gca/verify.hpp"

namespace gca {

inline constexpr double kBruteForceLimit = 1e7;
inline constexpr std::size_t kNaiveNodeLimit = 14;

struct BruteForceEntry {
  std::vector<BranchIndex> branches;
  ViolationReport report;
};

/// Verifies every x-subset (x in {1, 2}) of in-service branches and keeps the
/// ones that are not clean, sorted by overflow count desc then branch keys.
std::vector<BruteForceEntry> bruteforce_nx(const Network& net, std::size_t x,
                                           const VerifyOptions& options = {},
                                           std::size_t threads = 1);

/// Edge betweenness by listing every shortest path of every pair.
double naive_betweenness(const Multigraph& g, EdgeId e);
double naive_gbc(const Multigraph& g, const EdgeGroup& group);

}  // namespace gca
