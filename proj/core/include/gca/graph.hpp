#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gca/network.hpp"

namespace gca {

// Node and edge labels. When built from a Network these are bus and branch
// indices; subgraphs keep the labels of the graph they were cut from.
using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Undirected multigraph with labelled nodes and edges. Parallel edges are
/// distinct entries. Nodes are stored in ascending label order and edges in
/// ascending id order, which fixes the iteration order of every algorithm.
class Multigraph {
 public:
  struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    EdgeId id = 0;
  };

  // Local (dense, 0-based) adjacency entry.
  struct Incidence {
    std::size_t neighbor = 0;
    std::size_t edge = 0;
  };

  Multigraph() = default;
  Multigraph(std::vector<NodeId> nodes, std::vector<Edge> edges);

  /// In-service branches of `net` minus `outages`; one node per bus.
  static Multigraph from_network(const Network& net, std::span<const BranchIndex> outages = {});

  std::span<const NodeId> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_node(NodeId n) const { return find_local(n).has_value(); }
  bool has_edge(EdgeId e) const { return find_edge(e).has_value(); }

  std::optional<std::size_t> find_local(NodeId n) const;
  std::size_t local(NodeId n) const;
  std::optional<std::size_t> find_edge(EdgeId e) const;
  std::size_t edge_position(EdgeId e) const;

  std::size_t edge_u(std::size_t pos) const { return local_ends_[pos].first; }
  std::size_t edge_v(std::size_t pos) const { return local_ends_[pos].second; }

  std::span<const Incidence> incident(std::size_t local_node) const {
    return {adjacency_.data() + offsets_[local_node], offsets_[local_node + 1] - offsets_[local_node]};
  }

  Multigraph induced(std::span<const NodeId> nodes) const;
  Multigraph without_edges(std::span<const EdgeId> removed) const;

 private:
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> local_ends_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
};

/// Nonempty, duplicate-free set of edges that exist in a given graph.
class EdgeGroup {
 public:
  EdgeGroup(const Multigraph& g, std::vector<EdgeId> edges);

  std::span<const EdgeId> edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }

 private:
  std::vector<EdgeId> edges_;
};

struct PathCount {
  std::optional<std::size_t> distance;  // empty when disconnected
  std::uint64_t count = 0;
  std::vector<EdgeId> path;  // one representative shortest path, s -> t
};

/// Hop-count distance, number of distinct shortest paths and one of them.
PathCount shortest_path_counts(const Multigraph& g, NodeId s, NodeId t);

/// Edge betweenness of every edge, in edges() order, summed over unordered
/// node pairs (Brandes accumulation).
std::vector<double> edge_betweenness_all(const Multigraph& g);
double edge_betweenness(const Multigraph& g, EdgeId e);

/// Sum over unordered pairs {s,t} of the fraction of shortest s-t paths that
/// use at least one edge of the group.
double group_betweenness(const Multigraph& g, const EdgeGroup& group);

/// Path-sampling variant: for every ordered pair, one deterministic shortest
/// path is drawn and each group edge on it scores 1; the total is halved.
/// Counts overlap when a path carries several group edges.
double representative_path_score(const Multigraph& g, const EdgeGroup& group);

/// Subgraph induced on every node within `level` hops of any seed.
Multigraph khop_subgraph(const Multigraph& g, std::span<const NodeId> seeds, std::size_t level);

/// Node labels within `level` hops of any seed, ascending.
std::vector<NodeId> khop_nodes(const Multigraph& g, std::span<const NodeId> seeds, std::size_t level);

/// Connected components as ascending label lists, ordered by smallest label.
std::vector<std::vector<NodeId>> connected_components(const Multigraph& g);

/// Edges whose removal disconnects their endpoints, ascending by id. A pair
/// of parallel edges is never a bridge.
std::vector<EdgeId> bridges(const Multigraph& g);

}  // namespace gca
