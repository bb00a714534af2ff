#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gca/dcpf.hpp"
#include "gca/graph.hpp"
#include "gca/network.hpp"

namespace gca::testing {

inline std::string data_path(const std::string& name) { return std::string(GCA_DATA_DIR) + "/" + name; }

inline Branch line(int from, int to, double x = 0.1, double rating = 0.0, std::string circuit = "1") {
  return Branch{from, to, std::move(circuit), x, rating, true};
}

// Bus 1 slack generating `mw`, bus 2 loads it.
inline Network two_bus(double mw = 100.0) {
  return Network::create({{1, 230, BusType::Slack, 0.0}, {2, 230, BusType::PQ, mw}}, {line(1, 2)},
                         {{1, mw, 1000.0, true}});
}

// Equal-reactance triangle: branches (1,2), (1,3), (3,2); `mw` moves from
// bus 1 to bus 2. `rating_13` rates branch (1,3).
inline Network triangle(double mw = 90.0, double rating_13 = 0.0) {
  return Network::create(
      {{1, 230, BusType::Slack, 0.0}, {2, 230, BusType::PQ, mw}, {3, 230, BusType::PQ, 0.0}},
      {line(1, 2), line(1, 3, 0.1, rating_13), line(3, 2)}, {{1, mw, 1000.0, true}});
}

// Five-bus mesh plus a radial bus 6 fed through bridge (5,6) carrying
// 150 MW. Ring loads are small.
inline Network six_bus_with_bridge() {
  std::vector<Bus> buses{{1, 230, BusType::Slack, 0.0}, {2, 230, BusType::PQ, 10.0},
                         {3, 230, BusType::PQ, 20.0},   {4, 230, BusType::PV, 10.0},
                         {5, 230, BusType::PQ, 15.0},   {6, 115, BusType::PQ, 150.0}};
  std::vector<Branch> branches{line(1, 2, 0.08, 250), line(2, 3, 0.10, 250), line(3, 4, 0.12, 250),
                               line(4, 5, 0.09, 250), line(5, 1, 0.07, 250), line(2, 5, 0.15, 250),
                               line(5, 6, 0.05, 200)};
  return Network::create(std::move(buses), std::move(branches), {{1, 165.0, 400.0, true}, {4, 40.0, 60.0, true}});
}

// Six-bus meshed network without bridges, with a parallel circuit.
inline Network six_bus_mesh() {
  std::vector<Bus> buses{{1, 230, BusType::Slack, 0.0}, {2, 230, BusType::PV, 40.0}, {3, 230, BusType::PQ, 70.0},
                         {4, 230, BusType::PQ, 60.0},   {5, 230, BusType::PQ, 50.0}, {6, 230, BusType::PV, 30.0}};
  std::vector<Branch> branches{line(1, 2, 0.10, 200), line(1, 4, 0.20, 200),      line(1, 5, 0.15, 200),
                               line(2, 3, 0.12, 200), line(2, 4, 0.08, 200),      line(2, 5, 0.18, 200),
                               line(2, 6, 0.10, 200), line(3, 5, 0.14, 200),      line(3, 6, 0.05, 200),
                               line(4, 5, 0.25, 200), line(5, 6, 0.20, 200),      line(4, 5, 0.25, 200, "2")};
  return Network::create(std::move(buses), std::move(branches),
                         {{1, 120.0, 300.0, true}, {2, 80.0, 150.0, true}, {6, 60.0, 100.0, true}});
}

// Two triangles {1,2,3} and {4,5,6} joined by bridge (3,4). Load sits on
// the slackless side.
inline Network barbell() {
  std::vector<Bus> buses{{1, 230, BusType::Slack, 0.0}, {2, 230, BusType::PQ, 10.0}, {3, 230, BusType::PQ, 0.0},
                         {4, 230, BusType::PQ, 0.0},    {5, 230, BusType::PQ, 20.0}, {6, 230, BusType::PQ, 30.0}};
  std::vector<Branch> branches{line(1, 2), line(2, 3), line(1, 3), line(3, 4), line(4, 5), line(5, 6), line(4, 6)};
  return Network::create(std::move(buses), std::move(branches), {{1, 60.0, 100.0, true}});
}

// Random connected-or-not multigraph with parallel edges allowed.
inline Multigraph random_multigraph(std::mt19937& rng, std::size_t max_nodes = 12, std::size_t max_edges = 20) {
  std::uniform_int_distribution<std::size_t> node_dist(2, max_nodes);
  const std::size_t n = node_dist(rng);
  std::uniform_int_distribution<std::size_t> edge_dist(1, max_edges);
  const std::size_t m = edge_dist(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<NodeId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = 3 * i + 1;  // non-contiguous labels
  std::vector<Multigraph::Edge> edges;
  for (std::size_t e = 0; e < m; ++e) {
    std::size_t u = pick(rng), v = pick(rng);
    while (v == u) v = pick(rng);
    edges.push_back({nodes[u], nodes[v], 100 + e});
  }
  return Multigraph(std::move(nodes), std::move(edges));
}

inline Multigraph graph_from_pairs(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<NodeId> nodes;
  for (std::size_t i = 1; i <= n; ++i) nodes.push_back(i);
  std::vector<Multigraph::Edge> edges;
  for (std::size_t e = 0; e < pairs.size(); ++e) edges.push_back({pairs[e].first, pairs[e].second, e});
  return Multigraph(std::move(nodes), std::move(edges));
}

// Dense reference DC solve: full nodal matrix over the slack's component,
// slack row and column dropped, pivoted LU. Branches outside the component
// carry 0.
inline std::vector<double> reference_flows(const Network& net, const std::vector<BranchIndex>& outages = {}) {
  const std::set<BranchIndex> out(outages.begin(), outages.end());
  auto live = [&](BranchIndex i) { return net.branches()[i].in_service && !out.count(i); };
  std::vector<int> seen(net.bus_count(), 0);
  std::queue<BusIndex> queue;
  queue.push(net.slack());
  seen[net.slack()] = 1;
  while (!queue.empty()) {
    const BusIndex b = queue.front();
    queue.pop();
    for (BranchIndex i = 0; i < net.branch_count(); ++i) {
      if (!live(i)) continue;
      const BusIndex f = net.from_index(i), t = net.to_index(i);
      const BusIndex other = f == b ? t : (t == b ? f : b);
      if (other != b && !seen[other]) {
        seen[other] = 1;
        queue.push(other);
      }
    }
  }
  std::vector<long> row(net.bus_count(), -1);
  long n = 0;
  for (BusIndex b = 0; b < net.bus_count(); ++b) {
    if (seen[b] && b != net.slack()) row[b] = n++;
  }
  Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd injection = Eigen::VectorXd::Zero(n);
  const auto p = net.net_injection_mw();
  for (BusIndex b = 0; b < net.bus_count(); ++b) {
    if (row[b] >= 0) injection(row[b]) = p[b] / net.base_mva();
  }
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!live(i) || !seen[net.from_index(i)]) continue;
    const double y = 1.0 / net.branches()[i].reactance_pu;
    const long f = row[net.from_index(i)], t = row[net.to_index(i)];
    if (f >= 0) bmat(f, f) += y;
    if (t >= 0) bmat(t, t) += y;
    if (f >= 0 && t >= 0) {
      bmat(f, t) -= y;
      bmat(t, f) -= y;
    }
  }
  const Eigen::VectorXd theta = bmat.fullPivLu().solve(injection);
  std::vector<double> flows(net.branch_count(), 0.0);
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!live(i) || !seen[net.from_index(i)]) continue;
    const long f = row[net.from_index(i)], t = row[net.to_index(i)];
    const double tf = f >= 0 ? theta(f) : 0.0, tt = t >= 0 ? theta(t) : 0.0;
    flows[i] = (tf - tt) / net.branches()[i].reactance_pu * net.base_mva();
  }
  return flows;
}

struct LodfCheck {
  std::size_t columns = 0;  // outages re-solved
  double worst = 0.0;       // max |error| / max(|pre-flow of outage|, 1)
};

// Compares every non-islanding LODF column carrying more than 1 MW against a
// dense re-solve with that branch removed.
inline LodfCheck check_lodf_against_resolve(const Network& net) {
  const LodfMatrix lodf = compute_lodf(net);
  const auto pre = reference_flows(net);
  LodfCheck check;
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (!lodf.active[i] || lodf.islanding_column(i) || std::abs(pre[i]) <= 1.0) continue;
    const auto post = reference_flows(net, {i});
    ++check.columns;
    const double scale = std::max(std::abs(pre[i]), 1.0);
    for (BranchIndex k = 0; k < net.branch_count(); ++k) {
      if (k == i || !lodf.active[k]) continue;
      const double err = std::abs((post[k] - pre[k]) - lodf.at(k, i) * pre[i]) / scale;
      check.worst = std::max(check.worst, err);
    }
  }
  return check;
}

}  // namespace gca::testing
