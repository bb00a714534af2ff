#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gca/dcpf.hpp"
#include "gca/graph.hpp"
#include "gca/network.hpp"

namespace gca {

enum class GbcMode {
  Exact,               // fractional sigma(s,t|group) / sigma(s,t)
  RepresentativePath,  // one sampled shortest path per ordered pair, halved
};

struct ScreeningConfig {
  std::size_t x = 1;              // contingency order
  std::size_t search_level = 3;   // hop radius around seed endpoints
  double top_percent = 10.0;      // share of branches used as seeds, (0, 100]
  // NLODF values at or above this saturate to weight 1. 1.0 gives
  // M = |PF| * min(NLODF, 1); 10.0 mimics the threshold-style rule.
  double nlodf_saturation = 1.0;
  GbcMode gbc_mode = GbcMode::Exact;
  std::size_t threads = 1;

  void validate() const;  // throws std::invalid_argument
};

struct BranchScore {
  BranchIndex branch = 0;
  double flow_mw = 0.0;  // signed pre-outage flow
  double nlodf = 0.0;
  double m = 0.0;
};

using ScoreTable = std::map<BranchIndex, BranchScore>;

/// mean / population std of the off-diagonal |LODF| entries in column i,
/// capped at 1. Bridges and zero-spread columns give 1.
double nlodf_metric(const LodfMatrix& lodf, BranchIndex i);

/// Uncapped mean / std ratio (islanding and zero spread still map to 1).
double nlodf_raw(const LodfMatrix& lodf, BranchIndex i);

/// M(i) = |PF(i)| * weight(NLODF(i)), weight = min(NLODF, 1) by default.
/// Throws LookupError when a branch has no flow.
ScoreTable importance_metric(const std::map<BranchIndex, double>& nlodf,
                             const std::map<BranchIndex, double>& flows_mw,
                             double nlodf_saturation = 1.0);

/// True when a ranks before b: M desc, |PF| desc, branch key asc.
bool ranks_before(const Network& net, const BranchScore& a, const BranchScore& b);

/// Top ceil(top_percent% of |scores|) branches in rank order.
std::vector<BranchIndex> select_investigated_branches(const Network& net, const ScoreTable& scores,
                                                      const ScreeningConfig& cfg);

struct Neighborhood {
  BranchIndex seed = 0;
  std::vector<BusIndex> nodes;
  Multigraph subgraph;
};

std::vector<Neighborhood> build_neighborhoods(const Network& net, const Multigraph& graph,
                                              std::span<const BranchIndex> investigated,
                                              std::size_t search_level);

struct ContingencyCandidate {
  std::vector<BranchIndex> branches;  // rank order within the neighborhood
  double gbc_score = 0.0;
  BranchIndex seed = 0;
  std::size_t neighborhood_buses = 0;
  std::size_t neighborhood_branches = 0;
  std::vector<std::size_t> search_levels;  // levels that produced it
};

/// Picks the x highest-ranked edges of the neighborhood and scores them with
/// group betweenness on the neighborhood subgraph. Empty when the subgraph
/// has fewer than x edges.
std::optional<ContingencyCandidate> importance_subgraph(const Network& net, const Neighborhood& nbhd,
                                                        const ScoreTable& scores,
                                                        const ScreeningConfig& cfg);

/// Per-network quantities shared by every screening run on that network.
struct ScreeningInputs {
  std::vector<double> flows_mw;
  LodfMatrix lodf;
  Multigraph graph;
  ScoreTable scores;
};

ScreeningInputs prepare_screening(const Network& net, double nlodf_saturation = 1.0);

struct ScreeningResult {
  std::vector<ContingencyCandidate> candidates;  // ranked
  std::vector<BranchIndex> investigated;
  std::size_t skipped = 0;
};

ScreeningResult screen(const Network& net, const ScreeningInputs& inputs, const ScreeningConfig& cfg);
ScreeningResult screen(const Network& net, const ScreeningConfig& cfg);

/// Union of screen() over several search levels. A branch set found at more
/// than one level keeps its best score and lists every level.
ScreeningResult screen_sweep(const Network& net, const ScreeningConfig& cfg,
                             std::span<const std::size_t> levels);

/// Sorts candidates by score desc, then branch-key tuple asc.
void rank_candidates(const Network& net, std::vector<ContingencyCandidate>& candidates);

}  // namespace gca
