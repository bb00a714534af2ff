#include "gca/dcpf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "gca/error.hpp"
#include "gca/graph.hpp"

namespace gca {
namespace {

// Reduced nodal susceptance system of the slack's component: one row per
// energized non-slack bus.
struct ReducedSystem {
  std::vector<bool> energized;
  std::vector<bool> active;
  std::vector<Eigen::Index> row;  // -1 for slack and de-energized buses
  Eigen::Index size = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

void build_reduced(const Network& net, std::span<const BranchIndex> outages, ReducedSystem& sys) {
  const Multigraph g = Multigraph::from_network(net, outages);
  const BusIndex slack = net.slack();
  const std::array<NodeId, 1> seed{slack};

  sys.energized.assign(net.bus_count(), false);
  for (NodeId b : khop_nodes(g, seed, std::numeric_limits<std::size_t>::max())) sys.energized[b] = true;

  sys.active.assign(net.branch_count(), false);
  for (const auto& e : g.edges()) sys.active[e.id] = sys.energized[e.u];

  sys.row.assign(net.bus_count(), -1);
  sys.size = 0;
  for (BusIndex b = 0; b < net.bus_count(); ++b) {
    if (sys.energized[b] && b != slack) sys.row[b] = sys.size++;
  }
  if (sys.size == 0) return;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * net.branch_count());
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!sys.active[i]) continue;
    const double b = 1.0 / net.branches()[i].reactance_pu;
    const Eigen::Index f = sys.row[net.from_index(i)];
    const Eigen::Index t = sys.row[net.to_index(i)];
    if (f >= 0) triplets.emplace_back(f, f, b);
    if (t >= 0) triplets.emplace_back(t, t, b);
    if (f >= 0 && t >= 0) {
      triplets.emplace_back(f, t, -b);
      triplets.emplace_back(t, f, -b);
    }
  }
  Eigen::SparseMatrix<double> B(sys.size, sys.size);
  B.setFromTriplets(triplets.begin(), triplets.end());
  sys.ldlt.compute(B);
  if (sys.ldlt.info() != Eigen::Success) {
    throw SolveError("nodal susceptance matrix factorization failed");
  }
  const auto d = sys.ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  if (!(d.minCoeff() > scale * 1e-14)) {
    throw SolveError(fmt::format("nodal susceptance matrix is singular (pivot ratio {:.3g})", d.minCoeff() / scale));
  }
}

}  // namespace

DcSolution solve_dc(const Network& net, std::span<const BranchIndex> outages) {
  ReducedSystem sys;
  build_reduced(net, outages, sys);

  DcSolution sol;
  sol.energized = sys.energized;
  sol.theta.assign(net.bus_count(), std::numeric_limits<double>::quiet_NaN());
  sol.flows_mw.assign(net.branch_count(), 0.0);
  sol.theta[net.slack()] = 0.0;

  if (sys.size > 0) {
    const auto injection = net.net_injection_mw();
    Eigen::VectorXd p(sys.size);
    for (BusIndex b = 0; b < net.bus_count(); ++b) {
      if (sys.row[b] >= 0) p(sys.row[b]) = injection[b] / net.base_mva();
    }
    const Eigen::VectorXd theta = sys.ldlt.solve(p);
    for (BusIndex b = 0; b < net.bus_count(); ++b) {
      if (sys.row[b] >= 0) sol.theta[b] = theta(sys.row[b]);
    }
  }
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!sys.active[i]) continue;
    const double dtheta = sol.theta[net.from_index(i)] - sol.theta[net.to_index(i)];
    sol.flows_mw[i] = dtheta / net.branches()[i].reactance_pu * net.base_mva();
    if (net.from_index(i) == net.slack()) sol.slack_injection_mw += sol.flows_mw[i];
    if (net.to_index(i) == net.slack()) sol.slack_injection_mw -= sol.flows_mw[i];
  }
  return sol;
}

std::vector<double> pre_outage_flows(const Network& net) { return solve_dc(net).flows_mw; }

PtdfMatrix compute_ptdf(const Network& net) {
  ReducedSystem sys;
  build_reduced(net, {}, sys);

  const auto n_br = static_cast<Eigen::Index>(net.branch_count());
  const auto n_bus = static_cast<Eigen::Index>(net.bus_count());
  PtdfMatrix ptdf;
  ptdf.slack = net.slack();
  ptdf.active = sys.active;
  ptdf.entries = Eigen::MatrixXd::Zero(n_br, n_bus);
  if (sys.size == 0) return ptdf;

  // Column j of X holds the angles for a unit injection at reduced bus j.
  const Eigen::MatrixXd X = sys.ldlt.solve(Eigen::MatrixXd::Identity(sys.size, sys.size));
  std::vector<Eigen::Index> bus_of_row(static_cast<std::size_t>(sys.size));
  for (BusIndex b = 0; b < net.bus_count(); ++b) {
    if (sys.row[b] >= 0) bus_of_row[static_cast<std::size_t>(sys.row[b])] = static_cast<Eigen::Index>(b);
  }
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!sys.active[i]) continue;
    const double b = 1.0 / net.branches()[i].reactance_pu;
    const Eigen::Index f = sys.row[net.from_index(i)];
    const Eigen::Index t = sys.row[net.to_index(i)];
    for (Eigen::Index j = 0; j < sys.size; ++j) {
      const double tf = f >= 0 ? X(f, j) : 0.0;
      const double tt = t >= 0 ? X(t, j) : 0.0;
      ptdf.entries(static_cast<Eigen::Index>(i), bus_of_row[static_cast<std::size_t>(j)]) = b * (tf - tt);
    }
  }
  return ptdf;
}

LodfMatrix compute_lodf(const Network& net, const PtdfMatrix& ptdf) {
  const auto n_br = static_cast<Eigen::Index>(net.branch_count());
  LodfMatrix lodf;
  lodf.active = ptdf.active;
  lodf.islanding.assign(net.branch_count(), false);
  lodf.entries = Eigen::MatrixXd::Zero(n_br, n_br);
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!lodf.active[i]) continue;
    const auto col = static_cast<Eigen::Index>(i);
    // Flow response to a unit transfer from the from-bus to the to-bus of i.
    Eigen::VectorXd phi = ptdf.entries.col(static_cast<Eigen::Index>(net.from_index(i))) -
                          ptdf.entries.col(static_cast<Eigen::Index>(net.to_index(i)));
    for (BranchIndex k = 0; k < net.branch_count(); ++k) {
      if (!lodf.active[k]) phi(static_cast<Eigen::Index>(k)) = 0.0;
    }
    const double denom = 1.0 - phi(col);
    if (std::abs(denom) < kIslandingTolerance) {
      lodf.islanding[i] = true;
      for (BranchIndex k = 0; k < net.branch_count(); ++k) {
        if (lodf.active[k]) lodf.entries(static_cast<Eigen::Index>(k), col) = std::numeric_limits<double>::quiet_NaN();
      }
    } else {
      lodf.entries.col(col) = phi / denom;
    }
    lodf.entries(col, col) = -1.0;
  }
  return lodf;
}

LodfMatrix compute_lodf(const Network& net) { return compute_lodf(net, compute_ptdf(net)); }

IslandReport detect_islands(const Network& net, std::span<const BranchIndex> outages) {
  const Multigraph g = Multigraph::from_network(net, outages);
  IslandReport report;
  report.components = connected_components(g);
  for (std::size_t c = 0; c < report.components.size(); ++c) {
    const auto& comp = report.components[c];
    if (!std::binary_search(comp.begin(), comp.end(), net.slack())) report.slackless.push_back(c);
  }
  return report;
}

}  // namespace gca
