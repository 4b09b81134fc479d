#pragma once

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sggraph/lattice.hpp"

namespace sggraph {

// Simple graph x in {0,1}^{E_V} on a finite window. Keeps an adjacency map so
// degree queries stay cheap during event-driven simulation.
class GraphState {
 public:
  GraphState() : window_(Window::from_vertices({{0, 0}})) {}
  explicit GraphState(Window w) : window_(std::move(w)) {}

  const Window& window() const { return window_; }

  bool has(const Edge& e) const { return edges_.count(e) != 0; }

  void add(const Edge& e) {
    check_in_window(e);
    if (edges_.insert(e).second) {
      adj_[e.a].push_back(e.b);
      adj_[e.b].push_back(e.a);
    }
  }

  void remove(const Edge& e) {
    if (edges_.erase(e) != 0) {
      erase_neighbor(e.a, e.b);
      erase_neighbor(e.b, e.a);
    }
  }

  void set(const Edge& e, bool present) { present ? add(e) : remove(e); }

  std::size_t edge_count() const { return edges_.size(); }

  // Degree of vertex i.
  int degree(const Vertex& i) const {
    auto it = adj_.find(i);
    return it == adj_.end() ? 0 : static_cast<int>(it->second.size());
  }

  // Neighbors of i (unsorted).
  const std::vector<Vertex>& neighbors(const Vertex& i) const {
    static const std::vector<Vertex> kEmpty;
    auto it = adj_.find(i);
    return it == adj_.end() ? kEmpty : it->second;
  }

  // Edges of x in canonical order.
  std::vector<Edge> edges_sorted() const {
    std::vector<Edge> es(edges_.begin(), edges_.end());
    std::sort(es.begin(), es.end());
    return es;
  }

  friend bool operator==(const GraphState& lhs, const GraphState& rhs) {
    return lhs.edges_ == rhs.edges_;
  }

 private:
  void check_in_window(const Edge& e) const {
    if (!window_.contains(e.a) || !window_.contains(e.b))
      throw std::invalid_argument("GraphState: edge endpoint outside window");
  }
  void erase_neighbor(const Vertex& v, const Vertex& n) {
    auto& lst = adj_[v];
    lst.erase(std::find(lst.begin(), lst.end(), n));
    if (lst.empty()) adj_.erase(v);
  }

  Window window_;
  std::unordered_set<Edge, EdgeHash> edges_;
  std::unordered_map<Vertex, std::vector<Vertex>, VertexHash> adj_;
};

// Degree of vertex i restricted to the L1 ball of radius k around i.
inline int restricted_degree(const GraphState& x, const Vertex& i, int k) {
  if (!x.window().contains(i))
    throw std::invalid_argument("restricted_degree: vertex outside window");
  int d = 0;
  for (const Vertex& j : x.neighbors(i))
    if (l1_distance(i, j) <= k) ++d;
  return d;
}

// Multigraph configuration z in N^{E}; value = number of parallel edges.
class MultigraphState {
 public:
  int count(const Edge& e) const {
    auto it = counts_.find(e);
    return it == counts_.end() ? 0 : it->second;
  }

  void increment(const Edge& e) { ++counts_[e]; }

  void decrement(const Edge& e) {
    auto it = counts_.find(e);
    if (it == counts_.end() || it->second == 0)
      throw std::logic_error("MultigraphState: decrement below zero");
    if (--it->second == 0) counts_.erase(it);
  }

  void set_count(const Edge& e, int c) {
    if (c < 0) throw std::invalid_argument("MultigraphState: negative count");
    if (c == 0) counts_.erase(e);
    else counts_[e] = c;
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [e, c] : counts_) t += static_cast<std::size_t>(c);
    return t;
  }

  const std::unordered_map<Edge, int, EdgeHash>& counts() const { return counts_; }

 private:
  std::unordered_map<Edge, int, EdgeHash> counts_;
};

}  // namespace sggraph
