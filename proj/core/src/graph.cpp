#include "gca/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "gca/error.hpp"

namespace gca {
namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Hop distances and shortest-path counts from one source, plus the BFS
// visiting order.
struct BfsResult {
  std::vector<std::size_t> order;
  std::vector<std::size_t> dist;
  std::vector<double> sigma;
};

void bfs_counts(const Multigraph& g, std::size_t s, BfsResult& r) {
  const std::size_t n = g.node_count();
  r.order.clear();
  r.dist.assign(n, kUnreached);
  r.sigma.assign(n, 0.0);
  r.dist[s] = 0;
  r.sigma[s] = 1.0;
  r.order.push_back(s);
  for (std::size_t head = 0; head < r.order.size(); ++head) {
    const std::size_t v = r.order[head];
    for (const auto& inc : g.incident(v)) {
      const std::size_t w = inc.neighbor;
      if (r.dist[w] == kUnreached) {
        r.dist[w] = r.dist[v] + 1;
        r.order.push_back(w);
      }
      if (r.dist[w] == r.dist[v] + 1) r.sigma[w] += r.sigma[v];
    }
  }
}

}  // namespace

Multigraph::Multigraph(std::vector<NodeId> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw std::invalid_argument("multigraph: duplicate node label");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].id == edges_[i - 1].id) {
      throw std::invalid_argument(fmt::format("multigraph: duplicate edge id {}", edges_[i].id));
    }
  }
  local_ends_.reserve(edges_.size());
  std::vector<std::size_t> degree(nodes_.size(), 0);
  for (const Edge& e : edges_) {
    auto u = find_local(e.u);
    auto v = find_local(e.v);
    if (!u || !v) throw LookupError(fmt::format("multigraph: edge {} has an endpoint outside the node set", e.id));
    if (*u == *v) throw std::invalid_argument(fmt::format("multigraph: edge {} is a self-loop", e.id));
    local_ends_.emplace_back(*u, *v);
    ++degree[*u];
    ++degree[*v];
  }
  offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t pos = 0; pos < edges_.size(); ++pos) {
    auto [u, v] = local_ends_[pos];
    adjacency_[fill[u]++] = {v, pos};
    adjacency_[fill[v]++] = {u, pos};
  }
}

Multigraph Multigraph::from_network(const Network& net, std::span<const BranchIndex> outages) {
  std::vector<bool> out(net.branch_count(), false);
  for (BranchIndex i : outages) out.at(i) = true;
  std::vector<NodeId> nodes(net.bus_count());
  for (BusIndex b = 0; b < net.bus_count(); ++b) nodes[b] = b;
  std::vector<Edge> edges;
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (net.branches()[i].in_service && !out[i]) edges.push_back({net.from_index(i), net.to_index(i), i});
  }
  return Multigraph(std::move(nodes), std::move(edges));
}

std::optional<std::size_t> Multigraph::find_local(NodeId n) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
  if (it == nodes_.end() || *it != n) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t Multigraph::local(NodeId n) const {
  if (auto l = find_local(n)) return *l;
  throw LookupError(fmt::format("unknown node {}", n));
}

std::optional<std::size_t> Multigraph::find_edge(EdgeId e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e, [](const Edge& a, EdgeId id) { return a.id < id; });
  if (it == edges_.end() || it->id != e) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

std::size_t Multigraph::edge_position(EdgeId e) const {
  if (auto p = find_edge(e)) return *p;
  throw LookupError(fmt::format("unknown edge {}", e));
}

Multigraph Multigraph::induced(std::span<const NodeId> nodes) const {
  std::vector<bool> keep(nodes_.size(), false);
  std::vector<NodeId> kept;
  for (NodeId n : nodes) {
    auto l = local(n);
    if (!keep[l]) kept.push_back(n);
    keep[l] = true;
  }
  std::vector<Edge> edges;
  for (std::size_t pos = 0; pos < edges_.size(); ++pos) {
    if (keep[local_ends_[pos].first] && keep[local_ends_[pos].second]) edges.push_back(edges_[pos]);
  }
  return Multigraph(std::move(kept), std::move(edges));
}

Multigraph Multigraph::without_edges(std::span<const EdgeId> removed) const {
  std::vector<bool> drop(edges_.size(), false);
  for (EdgeId e : removed) drop[edge_position(e)] = true;
  std::vector<Edge> edges;
  for (std::size_t pos = 0; pos < edges_.size(); ++pos) {
    if (!drop[pos]) edges.push_back(edges_[pos]);
  }
  return Multigraph(nodes_, std::move(edges));
}

EdgeGroup::EdgeGroup(const Multigraph& g, std::vector<EdgeId> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw std::invalid_argument("edge group is empty");
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw std::invalid_argument(fmt::format("edge group lists edge {} twice", *dup));
  }
  for (EdgeId e : edges_) {
    if (!g.has_edge(e)) throw LookupError(fmt::format("edge group member {} is not in the graph", e));
  }
}

PathCount shortest_path_counts(const Multigraph& g, NodeId s, NodeId t) {
  const std::size_t src = g.local(s);
  const std::size_t dst = g.local(t);
  const std::size_t n = g.node_count();
  std::vector<std::size_t> dist(n, kUnreached);
  std::vector<std::uint64_t> count(n, 0);
  std::vector<std::size_t> queue{src};
  dist[src] = 0;
  count[src] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    if (dist[dst] != kUnreached && dist[v] >= dist[dst]) break;
    for (const auto& inc : g.incident(v)) {
      const std::size_t w = inc.neighbor;
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
      if (dist[w] == dist[v] + 1) count[w] += count[v];
    }
  }
  PathCount result;
  if (dist[dst] == kUnreached) return result;
  result.distance = dist[dst];
  result.count = count[dst];
  for (std::size_t cur = dst; cur != src;) {
    for (const auto& inc : g.incident(cur)) {
      if (dist[inc.neighbor] + 1 == dist[cur]) {
        result.path.push_back(g.edges()[inc.edge].id);
        cur = inc.neighbor;
        break;
      }
    }
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

std::vector<double> edge_betweenness_all(const Multigraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> eb(g.edge_count(), 0.0);
  std::vector<double> delta(n);
  BfsResult bfs;
  for (std::size_t s = 0; s < n; ++s) {
    bfs_counts(g, s, bfs);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = bfs.order.rbegin(); it != bfs.order.rend(); ++it) {
      const std::size_t w = *it;
      for (const auto& inc : g.incident(w)) {
        const std::size_t v = inc.neighbor;
        if (bfs.dist[v] + 1 != bfs.dist[w]) continue;
        const double c = bfs.sigma[v] / bfs.sigma[w] * (1.0 + delta[w]);
        eb[inc.edge] += c;
        delta[v] += c;
      }
    }
  }
  // Every unordered pair was visited from both ends.
  for (double& v : eb) v *= 0.5;
  return eb;
}

double edge_betweenness(const Multigraph& g, EdgeId e) {
  const std::size_t pos = g.edge_position(e);
  return edge_betweenness_all(g)[pos];
}

double group_betweenness(const Multigraph& g, const EdgeGroup& group) {
  const std::size_t n = g.node_count();
  std::vector<bool> in_group(g.edge_count(), false);
  for (EdgeId e : group.edges()) in_group[g.edge_position(e)] = true;

  std::vector<std::size_t> dist(n), queue;
  std::vector<double> sigma(n), avoid(n);
  queue.reserve(n);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(avoid.begin(), avoid.end(), 0.0);
    queue.assign(1, s);
    dist[s] = 0;
    sigma[s] = 1.0;
    avoid[s] = 1.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      for (const auto& inc : g.incident(v)) {
        const std::size_t w = inc.neighbor;
        if (dist[w] == kUnreached) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] != dist[v] + 1) continue;
        sigma[w] += sigma[v];
        // avoid[w]: shortest s-w paths that use no group edge.
        if (!in_group[inc.edge]) avoid[w] += avoid[v];
      }
    }
    for (std::size_t i = 1; i < queue.size(); ++i) {
      const std::size_t t = queue[i];
      total += (sigma[t] - avoid[t]) / sigma[t];
    }
  }
  return 0.5 * total;
}

double representative_path_score(const Multigraph& g, const EdgeGroup& group) {
  const std::size_t n = g.node_count();
  std::vector<bool> in_group(g.edge_count(), false);
  for (EdgeId e : group.edges()) in_group[g.edge_position(e)] = true;

  std::vector<std::size_t> dist(n), queue, parent_edge(n), parent(n), subtree(n);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    queue.assign(1, s);
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      for (const auto& inc : g.incident(v)) {
        if (dist[inc.neighbor] != kUnreached) continue;
        dist[inc.neighbor] = dist[v] + 1;
        parent[inc.neighbor] = v;
        parent_edge[inc.neighbor] = inc.edge;
        queue.push_back(inc.neighbor);
      }
    }
    // The sampled s-t path is the BFS-tree path, so a tree edge lies on the
    // paths to every node of the subtree below it.
    for (std::size_t v : queue) subtree[v] = 1;
    for (std::size_t i = queue.size(); i-- > 1;) {
      const std::size_t v = queue[i];
      subtree[parent[v]] += subtree[v];
      if (in_group[parent_edge[v]]) total += static_cast<double>(subtree[v]);
    }
  }
  return 0.5 * total;
}

std::vector<NodeId> khop_nodes(const Multigraph& g, std::span<const NodeId> seeds, std::size_t level) {
  if (seeds.empty()) throw std::invalid_argument("k-hop expansion needs at least one seed");
  const std::size_t n = g.node_count();
  std::vector<std::size_t> dist(n, kUnreached);
  std::vector<std::size_t> queue;
  for (NodeId seed : seeds) {
    const std::size_t l = g.local(seed);
    if (dist[l] == kUnreached) {
      dist[l] = 0;
      queue.push_back(l);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    if (dist[v] >= level) continue;
    for (const auto& inc : g.incident(v)) {
      if (dist[inc.neighbor] == kUnreached) {
        dist[inc.neighbor] = dist[v] + 1;
        queue.push_back(inc.neighbor);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  std::vector<NodeId> labels;
  labels.reserve(queue.size());
  for (std::size_t l : queue) labels.push_back(g.nodes()[l]);
  return labels;
}

Multigraph khop_subgraph(const Multigraph& g, std::span<const NodeId> seeds, std::size_t level) {
  return g.induced(khop_nodes(g, seeds, level));
}

std::vector<std::vector<NodeId>> connected_components(const Multigraph& g) {
  const std::size_t n = g.node_count();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<NodeId>> components;
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    seen[start] = true;
    queue.assign(1, start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const auto& inc : g.incident(queue[head])) {
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          queue.push_back(inc.neighbor);
        }
      }
    }
    std::sort(queue.begin(), queue.end());
    std::vector<NodeId> labels;
    labels.reserve(queue.size());
    for (std::size_t l : queue) labels.push_back(g.nodes()[l]);
    components.push_back(std::move(labels));
  }
  return components;
}

std::vector<EdgeId> bridges(const Multigraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> disc(n, kUnreached), low(n, 0);
  std::vector<EdgeId> result;
  struct Frame {
    std::size_t node;
    std::size_t via_edge;  // edge position used to enter node
    std::size_t next = 0;  // next incidence to scan
  };
  std::vector<Frame> stack;
  std::size_t timer = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] != kUnreached) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, kUnreached});
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto inc = g.incident(f.node);
      if (f.next < inc.size()) {
        const auto& next = inc[f.next++];
        if (next.edge == f.via_edge) continue;  // only the entering edge, not its parallels
        if (disc[next.neighbor] == kUnreached) {
          disc[next.neighbor] = low[next.neighbor] = timer++;
          stack.push_back({next.neighbor, next.edge});
        } else {
          low[f.node] = std::min(low[f.node], disc[next.neighbor]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        const std::size_t parent = stack.back().node;
        low[parent] = std::min(low[parent], low[done.node]);
        if (low[done.node] > disc[parent]) result.push_back(g.edges()[done.via_edge].id);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace gca
