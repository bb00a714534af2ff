#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gca/network.hpp"

namespace gca {

/// Base-case or post-outage DC solution. Buses outside the slack's
/// connected component are de-energized: their angle is NaN and every
/// branch touching them carries 0.
struct DcSolution {
  std::vector<double> theta;       // radians, slack = 0
  std::vector<bool> energized;     // bus is in the slack's component
  std::vector<double> flows_mw;    // per branch, positive from -> to
  double slack_injection_mw = 0.0;
};

struct IslandReport {
  std::vector<std::vector<BusIndex>> components;  // ascending, by first bus
  std::vector<std::size_t> slackless;             // indices into components
};

/// Branch x bus power transfer distribution factors for injections balanced
/// at the slack. Only branches inside the slack's component are active.
struct PtdfMatrix {
  Eigen::MatrixXd entries;
  BusIndex slack = 0;
  std::vector<bool> active;

  double at(BranchIndex l, BusIndex b) const { return entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(b)); }
};

/// entries(k, i): change of flow on monitored branch k per unit of
/// pre-outage flow on outaged branch i. Columns of bridges are flagged and
/// hold no meaningful values; the diagonal is -1.
struct LodfMatrix {
  Eigen::MatrixXd entries;
  std::vector<bool> islanding;
  std::vector<bool> active;

  double at(BranchIndex k, BranchIndex i) const { return entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)); }
  bool islanding_column(BranchIndex i) const { return islanding.at(i); }
  std::size_t size() const { return active.size(); }
};

// |1 - phi_ii| below this marks a bridge.
inline constexpr double kIslandingTolerance = 1e-6;

DcSolution solve_dc(const Network& net, std::span<const BranchIndex> outages = {});
PtdfMatrix compute_ptdf(const Network& net);
LodfMatrix compute_lodf(const Network& net, const PtdfMatrix& ptdf);
LodfMatrix compute_lodf(const Network& net);
IslandReport detect_islands(const Network& net, std::span<const BranchIndex> outages = {});

}  // namespace gca
