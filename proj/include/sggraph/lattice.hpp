#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sggraph/rng.hpp"

namespace sggraph {

// Lattice point in Z^2.
struct Vertex {
  int x = 0;
  int y = 0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const {
    return static_cast<std::size_t>(splitmix64(pack_coords(v.x, v.y)));
  }
};

// L1 distance between lattice points.
inline int l1_distance(const Vertex& a, const Vertex& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Unordered pair of distinct vertices, stored with a < b (lexicographic) so
// equality and hashing are well defined.
struct Edge {
  Vertex a;
  Vertex b;

  Edge() = default;
  Edge(Vertex u, Vertex v) {
    if (u == v) throw std::invalid_argument("Edge: endpoints must be distinct");
    if (v < u) std::swap(u, v);
    a = u;
    b = v;
  }

  bool contains(const Vertex& v) const { return v == a || v == b; }
  Vertex other(const Vertex& v) const { return v == a ? b : a; }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const {
    std::uint64_t h = splitmix64(pack_coords(e.a.x, e.a.y));
    h = splitmix64(h ^ pack_coords(e.b.x, e.b.y));
    return static_cast<std::size_t>(h);
  }
};

// Edge length L(i,j) = |i-j| in L1.
inline int edge_length(const Edge& e) { return l1_distance(e.a, e.b); }

// Two edges are dependent (~) iff they share a vertex.
inline bool relates(const Edge& e1, const Edge& e2) {
  return e1.contains(e2.a) || e1.contains(e2.b);
}

// The idx-th vertex (0 <= idx < 4s) of the distance-s shell around i,
// enumerated one quadrant at a time.
inline Vertex shell_vertex(const Vertex& i, int s, int idx) {
  const int q = idx / s;
  const int k = idx % s;
  switch (q) {
    case 0: return {i.x + (s - k), i.y + k};
    case 1: return {i.x - k, i.y + (s - k)};
    case 2: return {i.x - (s - k), i.y - k};
    default: return {i.x + k, i.y - (s - k)};
  }
}

// All vertices at L1 distance exactly s from i; there are 4s of them.
inline std::vector<Vertex> shell(const Vertex& i, int s) {
  if (s < 1) throw std::invalid_argument("shell: radius must be >= 1");
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(4 * s));
  for (int q = 0; q < 4; ++q) {
    for (int k = 0; k < s; ++k) out.push_back(shell_vertex(i, s, q * s + k));
  }
  return out;
}

// Axis-aligned box of lattice points, inclusive on both corners.
struct Box {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  Box() = default;
  Box(int x0_, int x1_, int y0_, int y1_) : x0(x0_), x1(x1_), y0(y0_), y1(y1_) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("Box: empty range");
  }

  bool contains(const Vertex& v) const {
    return v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(x1 - x0 + 1) * static_cast<std::size_t>(y1 - y0 + 1);
  }
};

// Finite vertex window V. Holds an explicit sorted vertex list; remembers the
// box when constructed from one (the common case).
class Window {
 public:
  static Window from_box(const Box& b) {
    Window w;
    w.box_ = b;
    w.vertices_.reserve(b.size());
    for (int x = b.x0; x <= b.x1; ++x)
      for (int y = b.y0; y <= b.y1; ++y) w.vertices_.push_back({x, y});
    std::sort(w.vertices_.begin(), w.vertices_.end());
    return w;
  }

  static Window from_vertices(std::vector<Vertex> vs) {
    if (vs.empty()) throw std::invalid_argument("Window: empty vertex set");
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    Window w;
    w.vertices_ = std::move(vs);
    return w;
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const std::optional<Box>& box() const { return box_; }

  bool contains(const Vertex& v) const {
    if (box_) return box_->contains(v);
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }

  // E_V: all unordered pairs of distinct window vertices, canonically sorted.
  std::vector<Edge> all_edges() const {
    std::vector<Edge> es;
    es.reserve(vertices_.size() * (vertices_.size() - 1) / 2);
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        es.emplace_back(vertices_[i], vertices_[j]);
    std::sort(es.begin(), es.end());
    return es;
  }

  // d({v}, V^c): L1 distance from an inside vertex to the nearest vertex
  // outside the window.
  int distance_to_complement(const Vertex& v) const {
    if (!contains(v)) return 0;
    if (box_) {
      const int dx = std::min(v.x - box_->x0, box_->x1 - v.x);
      const int dy = std::min(v.y - box_->y0, box_->y1 - v.y);
      return 1 + std::min(dx, dy);
    }
    for (int s = 1;; ++s) {
      for (int idx = 0; idx < 4 * s; ++idx) {
        if (!contains(shell_vertex(v, s, idx))) return s;
      }
    }
  }

  // Window dilated by the L1 ball of radius r (used for embedding boxes).
  Window dilated(int r) const {
    if (r < 0) throw std::invalid_argument("Window::dilated: negative radius");
    std::vector<Vertex> vs(vertices_);
    for (const Vertex& v : vertices_) {
      for (int s = 1; s <= r; ++s)
        for (int idx = 0; idx < 4 * s; ++idx) vs.push_back(shell_vertex(v, s, idx));
    }
    return from_vertices(std::move(vs));
  }

 private:
  std::vector<Vertex> vertices_;
  std::optional<Box> box_;
};

// d(I, J) = min L(i, j) over i in I, j in J.
inline int set_distance(const std::vector<Vertex>& I, const std::vector<Vertex>& J) {
  if (I.empty() || J.empty()) throw std::invalid_argument("set_distance: empty set");
  int best = l1_distance(I.front(), J.front());
  for (const auto& i : I)
    for (const auto& j : J) best = std::min(best, l1_distance(i, j));
  return best;
}

inline int edge_pair_distance(const Edge& e, const Edge& f) {
  return set_distance({e.a, e.b}, {f.a, f.b});
}

}  // namespace sggraph
