#pragma once

#include <vector>

#include "sggraph/energy.hpp"
#include "sggraph/graph_state.hpp"
#include "sggraph/rng.hpp"

namespace sggraph {

// Marked rectangle of the graphical construction: an edge trying to live on
// the time interval [birth, birth + lifetime], with a uniform acceptance mark.
struct Rectangle {
  Edge basis;
  double birth = 0.0;
  double lifetime = 0.0;
  double mark = 0.0;

  double death() const { return birth + lifetime; }
  bool alive_at(double t) const { return birth <= t && t <= death(); }
};

// Rectangles of the per-edge marked Poisson stream (rate e^{-beta L - beta M})
// born in [t0, t1). Each edge owns an independent stream derived from the
// master seed and the edge coordinates, so the result does not depend on the
// order of the edge list.
inline std::vector<Rectangle> generate_rectangles(const std::vector<Edge>& edges, double beta,
                                                  double M, double t0, double t1,
                                                  std::uint64_t master_seed) {
  if (!(t0 < t1)) throw std::invalid_argument("generate_rectangles: need t0 < t1");
  if (beta <= 0) throw std::invalid_argument("generate_rectangles: beta must be > 0");
  std::vector<Rectangle> out;
  for (const Edge& e : edges) {
    Engine g = make_engine(derive_seed(master_seed, stream_tag::edge_births,
                                       pack_coords(e.a.x, e.a.y), pack_coords(e.b.x, e.b.y)));
    const double rate = birth_rate(e, beta, M);
    double t = t0 + exponential(g, rate);
    while (t < t1) {
      out.push_back({e, t, exponential1(g), uniform_open01(g)});
      t += exponential(g, rate);
    }
  }
  return out;
}

// Initial rectangles for a starting graph: one birth-0 rectangle per present
// edge, exponential(1) lifetime, uniform mark.
inline std::vector<Rectangle> initial_rectangles(const GraphState& x, std::uint64_t master_seed) {
  std::vector<Rectangle> out;
  for (const Edge& e : x.edges_sorted()) {
    Engine g = make_engine(derive_seed(master_seed, stream_tag::initial_rects,
                                       pack_coords(e.a.x, e.a.y), pack_coords(e.b.x, e.b.y)));
    out.push_back({e, 0.0, exponential1(g), uniform_open01(g)});
  }
  return out;
}

}  // namespace sggraph
