#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gca/dcpf.hpp"
#include "gca/network.hpp"

namespace gca {

enum class ViolationKind { None, Overflow, Islanding, SlackInfeasible };

std::string_view to_string(ViolationKind kind);

struct OverflowDetail {
  BranchIndex branch = 0;
  double flow_mw = 0.0;
  double loading_percent = 0.0;
};

// A slackless component that carries load or generation.
struct StrandedComponent {
  std::vector<BusIndex> buses;
  double load_mw = 0.0;
  double generation_mw = 0.0;
  bool slack_infeasible = false;  // net injection cannot be balanced
};

struct ViolationReport {
  std::vector<BranchIndex> candidate;  // ascending
  ViolationKind kind = ViolationKind::None;
  std::vector<OverflowDetail> overflows;
  std::optional<IslandReport> islands;
  std::vector<StrandedComponent> stranded;
};

struct VerifyOptions {
  double overflow_threshold_percent = 100.0;
};

/// Removes the branches, then classifies: islanding when a component without
/// the slack carries load or generation, otherwise overflow on every rated
/// branch loaded past the threshold, otherwise none.
ViolationReport verify_candidate(const Network& net, std::span<const BranchIndex> branches,
                                 const VerifyOptions& options = {});

struct StabilityReport {
  std::vector<BranchIndex> applied;  // outages actually applied, in order
  // values[step][branch]: NLODF / max NLODF of that step; empty when the
  // branch is no longer energized.
  std::vector<std::vector<std::optional<double>>> values;
  // Spearman correlation of NLODF between step s and s+1 over branches
  // present in both.
  std::vector<double> rank_correlation;
  std::vector<std::string> notices;
};

StabilityReport lodf_stability_report(const Network& net, std::span<const BranchIndex> sequence);

}  // namespace gca
