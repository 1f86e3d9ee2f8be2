#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scot/error.hpp"

namespace scot {

/// Simple undirected graph over ordered vertex labels.
///
/// Edges are stored once, with the smaller endpoint first. Self-loops are
/// rejected; duplicate insertions are no-ops.
template <typename V>
class BasicGraph {
 public:
  using Vertex = V;
  using Edge = std::pair<V, V>;

  void add_vertex(const V& v) { adjacency_.try_emplace(v); }

  void add_edge(const V& a, const V& b) {
    if (a == b) throw Error(ErrorCode::InvalidGraph, "self-loop rejected");
    add_vertex(a);
    add_vertex(b);
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
    edges_.insert(normalized(a, b));
  }

  bool has_vertex(const V& v) const { return adjacency_.count(v) != 0; }

  bool has_edge(const V& a, const V& b) const { return edges_.count(normalized(a, b)) != 0; }

  std::size_t order() const { return adjacency_.size(); }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return adjacency_.empty(); }

  std::vector<V> vertices() const {
    std::vector<V> out;
    out.reserve(adjacency_.size());
    for (const auto& [v, _] : adjacency_) out.push_back(v);
    return out;
  }

  const std::set<Edge>& edges() const { return edges_; }

  const std::set<V>& adjacent(const V& v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) throw Error(ErrorCode::InvalidGraph, "unknown vertex");
    return it->second;
  }

  /// BFS hop distances from `source` to every reachable vertex.
  std::map<V, std::size_t> distances_from(const V& source) const {
    std::map<V, std::size_t> dist;
    std::deque<V> frontier{source};
    dist[source] = 0;
    while (!frontier.empty()) {
      V cur = frontier.front();
      frontier.pop_front();
      for (const V& next : adjacent(cur)) {
        if (dist.try_emplace(next, dist[cur] + 1).second) frontier.push_back(next);
      }
    }
    return dist;
  }

  bool connected() const {
    if (adjacency_.empty()) return true;
    return distances_from(adjacency_.begin()->first).size() == adjacency_.size();
  }

  /// A forest has |E| = |V| - (number of components).
  bool acyclic() const {
    std::set<V> seen;
    std::size_t components = 0;
    for (const auto& [v, _] : adjacency_) {
      if (seen.count(v)) continue;
      ++components;
      for (const auto& [reached, _d] : distances_from(v)) seen.insert(reached);
    }
    return edges_.size() + components == adjacency_.size();
  }

  bool complete() const {
    const std::size_t n = adjacency_.size();
    return edges_.size() == n * (n - (n > 0 ? 1 : 0)) / 2;
  }

  /// Subgraph induced by `keep`.
  BasicGraph induced(const std::set<V>& keep) const {
    BasicGraph out;
    for (const V& v : keep) {
      if (has_vertex(v)) out.add_vertex(v);
    }
    for (const auto& [a, b] : edges_) {
      if (keep.count(a) && keep.count(b)) out.add_edge(a, b);
    }
    return out;
  }

  friend bool operator==(const BasicGraph& x, const BasicGraph& y) {
    return x.adjacency_ == y.adjacency_ && x.edges_ == y.edges_;
  }

 private:
  static Edge normalized(const V& a, const V& b) { return b < a ? Edge{b, a} : Edge{a, b}; }

  std::map<V, std::set<V>> adjacency_;
  std::set<Edge> edges_;
};

using Label = std::string;
using Graph = BasicGraph<Label>;

/// Cartesian product G □ H. (g,h)~(g',h') iff g=g' and hh' ∈ E_H, or gg' ∈ E_G and h=h'.
template <typename A, typename B>
BasicGraph<std::pair<A, B>> cartesian_product(const BasicGraph<A>& g, const BasicGraph<B>& h) {
  BasicGraph<std::pair<A, B>> out;
  const auto gv = g.vertices();
  const auto hv = h.vertices();
  for (const A& a : gv) {
    for (const B& b : hv) out.add_vertex({a, b});
  }
  for (const A& a : gv) {
    for (const auto& [h1, h2] : h.edges()) out.add_edge({a, h1}, {a, h2});
  }
  for (const auto& [g1, g2] : g.edges()) {
    for (const B& b : hv) out.add_edge({g1, b}, {g2, b});
  }
  return out;
}

/// Longest shortest path. Throws DisconnectedGraph when some pair is unreachable.
template <typename V>
std::size_t graph_diameter(const BasicGraph<V>& g) {
  std::size_t diameter = 0;
  for (const V& v : g.vertices()) {
    const auto dist = g.distances_from(v);
    if (dist.size() != g.order()) throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");
    for (const auto& [_, d] : dist) diameter = std::max(diameter, d);
  }
  return diameter;
}

}  // namespace scot
