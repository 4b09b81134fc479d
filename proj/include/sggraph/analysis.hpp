#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sggraph/errors.hpp"
#include "sggraph/lattice.hpp"

namespace sggraph {

// Subcriticality functional alpha(beta) = 8 e^{-beta(M+1)} / (1 - e^{-beta})^2.
// The backward-percolation branching process is subcritical iff alpha < 1.
inline double alpha(double beta, double M) {
  if (beta <= 0) throw std::invalid_argument("alpha: beta must be > 0");
  if (M <= -1) throw std::invalid_argument("alpha: M must be > -1");
  const double d = 1.0 - std::exp(-beta);
  return 8.0 * std::exp(-beta * (M + 1.0)) / (d * d);
}

// Critical threshold beta* = inf{beta > 0 : alpha(beta) <= 1}, found by
// bisection; alpha is strictly decreasing in beta for M > -1.
inline double beta_star(double M, double tol = 1e-9) {
  if (M <= -1) throw std::invalid_argument("beta_star: M must be > -1");
  double lo = 1e-6;
  if (alpha(lo, M) <= 1.0)
    throw std::runtime_error("beta_star: bracketing failure at lower seed");
  double hi = 1.0;
  while (alpha(hi, M) > 1.0) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("beta_star: bracketing failure");
  }
  while (std::abs(alpha(0.5 * (lo + hi), M) - 1.0) >= tol) {
    const double mid = 0.5 * (lo + hi);
    (alpha(mid, M) > 1.0 ? lo : hi) = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// Midpoint default for the free parameter beta_tilde in (beta*, beta).
inline double default_beta_tilde(double beta, double M) {
  const double bs = beta_star(M);
  if (beta <= bs) throw GuardError("beta <= beta*: no valid beta_tilde");
  return 0.5 * (bs + beta);
}

// Query for the Theorem-style bounds: finite window V, a function known only
// through its support (vertex set or edge set) and sup norm.
struct BoundQuery {
  double beta = 0.0;
  double beta_tilde = 0.0;  // must lie in (beta*, beta)
  double M = 0.0;
  std::variant<std::vector<Vertex>, std::vector<Edge>> support;
  Window window = Window::from_vertices({{0, 0}});
  double f_sup_norm = 0.0;

  bool vertex_form() const { return support.index() == 0; }
};

inline void check_bound_query(const BoundQuery& q) {
  if (!(q.beta_tilde > 0) || !(q.beta_tilde < q.beta))
    throw std::invalid_argument("BoundQuery: need 0 < beta_tilde < beta");
  if (alpha(q.beta_tilde, q.M) >= 1.0)
    throw GuardError("BoundQuery: alpha(beta_tilde) >= 1");
}

// Exponential space-convergence bound on |mu f - mu_V f|.
//
// Vertex-support form:
//   (alpha(bt)/(1-alpha(bt))) e^{-(beta-bt)M} ||f|| sum_j e^{-(beta-bt) d({j},V^c)}
// Edge-support form:
//   (2||f||/(1-alpha(bt))) sum_{ij} e^{-bt L(ij) - beta M} e^{-(beta-bt) d({ij},V^c)}
inline double space_convergence_bound(const BoundQuery& q) {
  check_bound_query(q);
  const double a = alpha(q.beta_tilde, q.M);
  const double gap = q.beta - q.beta_tilde;
  if (q.vertex_form()) {
    const auto& vs = std::get<0>(q.support);
    double s = 0.0;
    for (const Vertex& v : vs) s += std::exp(-gap * q.window.distance_to_complement(v));
    return (a / (1.0 - a)) * std::exp(-gap * q.M) * q.f_sup_norm * s;
  }
  const auto& es = std::get<1>(q.support);
  double s = 0.0;
  for (const Edge& e : es) {
    const int d = std::min(q.window.distance_to_complement(e.a),
                           q.window.distance_to_complement(e.b));
    s += std::exp(-q.beta_tilde * edge_length(e) - q.beta * q.M) * std::exp(-gap * d);
  }
  return (2.0 * q.f_sup_norm / (1.0 - a)) * s;
}

// Exponential mixing bound on |mu_V(fg) - mu_V f mu_V g|. Both queries must
// share beta, beta_tilde and M, and be of the same support form.
inline double mixing_bound(const BoundQuery& qf, const BoundQuery& qg) {
  check_bound_query(qf);
  check_bound_query(qg);
  if (qf.beta != qg.beta || qf.beta_tilde != qg.beta_tilde || qf.M != qg.M)
    throw std::invalid_argument("mixing_bound: parameter mismatch");
  if (qf.vertex_form() != qg.vertex_form())
    throw std::invalid_argument("mixing_bound: mixed support forms");
  const double a = alpha(qf.beta_tilde, qf.M);
  const double gap = qf.beta - qf.beta_tilde;
  const double norms = qf.f_sup_norm * qg.f_sup_norm;
  if (qf.vertex_form()) {
    double s = 0.0;
    for (const Vertex& i : std::get<0>(qf.support))
      for (const Vertex& j : std::get<0>(qg.support)) {
        const double L = l1_distance(i, j);
        s += L * std::exp(-gap * L);
      }
    const double r = a / (1.0 - a);
    return 0.5 * r * r * std::exp(-2.0 * gap * qf.M) * norms * s;
  }
  double s = 0.0;
  for (const Edge& e : std::get<1>(qf.support))
    for (const Edge& f : std::get<1>(qg.support)) {
      const double d = edge_pair_distance(e, f);
      s += d *
           std::exp(-qf.beta_tilde * (edge_length(e) + edge_length(f)) -
                    2.0 * qf.beta * qf.M) *
           std::exp(-gap * d);
    }
  return (2.0 * norms / ((1.0 - a) * (1.0 - a))) * s;
}

enum class ClanRootKind { VertexRoot, EdgeRoot };

// Tail bound on the clan space diameter, P(SD > k).
//
//   vertex clan:  (1/2)(alpha(bt)/(1-alpha(bt))) e^{-(beta-bt)M} e^{-(beta-bt)k}
//   edge clan:    (e^{-bt L - beta M}/(1-alpha(bt))) e^{-(beta-bt)k}
inline double sd_tail_bound(ClanRootKind kind, int k, double beta, double beta_tilde, double M,
                            int L = 1) {
  if (!(beta_tilde > 0) || !(beta_tilde < beta))
    throw std::invalid_argument("sd_tail_bound: need 0 < beta_tilde < beta");
  const double a = alpha(beta_tilde, M);
  if (a >= 1.0) throw GuardError("sd_tail_bound: alpha(beta_tilde) >= 1");
  const double gap = beta - beta_tilde;
  if (kind == ClanRootKind::VertexRoot)
    return 0.5 * (a / (1.0 - a)) * std::exp(-gap * M) * std::exp(-gap * k);
  return std::exp(-beta_tilde * L - beta * M) / (1.0 - a) * std::exp(-gap * k);
}

// Tail bound on the clan time length of a single-edge clan,
// P(TL > b t) <= e^{-beta L - beta M} e^{-(1-alpha(beta)) b t}.
inline double tl_tail_bound(int L, double b, double t, double beta, double M) {
  if (b <= 0 || t <= 0) throw std::invalid_argument("tl_tail_bound: b, t must be > 0");
  const double a = alpha(beta, M);
  if (a >= 1.0) throw GuardError("tl_tail_bound: alpha(beta) >= 1");
  return std::exp(-beta * L - beta * M) * std::exp(-(1.0 - a) * b * t);
}

// Expected-degree bound mu(d_i) <= alpha(beta)/2.
inline double expected_degree_bound(double beta, double M) {
  return 0.5 * alpha(beta, M);
}

// Per-vertex total candidate-edge rate: sum over j != i of e^{-beta L(i,j) - beta M}
// = sum_{s>=1} 4s e^{-beta s - beta M} = alpha(beta)/2, in closed form.
inline double per_vertex_rate(double beta, double M) { return 0.5 * alpha(beta, M); }

}  // namespace sggraph
