#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "sggraph/energy.hpp"
#include "sggraph/errors.hpp"

namespace sggraph {

// Deliberately naive brute-force oracle: full enumeration of X^V. Everything
// else in the library is validated against this module on tiny windows.

inline constexpr std::size_t kDefaultMaxExactEdges = 24;

inline void check_enumeration_guard(std::size_t n_edges, std::size_t max_edges) {
  if (n_edges > max_edges)
    throw GuardError("exact enumeration guard: window has " + std::to_string(n_edges) +
                     " edges, limit is " + std::to_string(max_edges));
}

// Graph for a given bitmask over the canonical edge list of V.
inline GraphState state_from_mask(const Window& V, const std::vector<Edge>& edges,
                                  std::uint32_t mask) {
  GraphState x(V);
  for (std::size_t b = 0; b < edges.size(); ++b)
    if (mask & (1u << b)) x.add(edges[b]);
  return x;
}

// All 2^{|E_V|} simple graphs on V, in bitmask order.
inline std::vector<GraphState> enumerate_states(const Window& V,
                                                std::size_t max_edges = kDefaultMaxExactEdges) {
  const auto edges = V.all_edges();
  check_enumeration_guard(edges.size(), max_edges);
  const std::uint64_t n = 1ull << edges.size();
  std::vector<GraphState> out;
  out.reserve(n);
  for (std::uint64_t mask = 0; mask < n; ++mask)
    out.push_back(state_from_mask(V, edges, static_cast<std::uint32_t>(mask)));
  return out;
}

// Exact finite-volume Gibbs distribution: table over edge bitmasks.
struct ExactDistribution {
  Window window;
  double beta = 1.0;
  std::vector<Edge> edges;     // canonical order; bit b <-> edges[b]
  std::vector<double> energy;  // H_V per bitmask
  std::vector<double> prob;    // mu_V per bitmask
  double log_z = 0.0;          // log Z_V(beta)

  std::size_t size() const { return prob.size(); }

  double expectation(const std::function<double(const GraphState&)>& f) const {
    double s = 0.0;
    for (std::uint64_t mask = 0; mask < prob.size(); ++mask)
      s += f(state_from_mask(window, edges, static_cast<std::uint32_t>(mask))) * prob[mask];
    return s;
  }

  // Marginal probability that a given edge is present.
  double edge_marginal(const Edge& e) const {
    std::size_t bit = edges.size();
    for (std::size_t b = 0; b < edges.size(); ++b)
      if (edges[b] == e) bit = b;
    if (bit == edges.size()) throw ConfigError("edge_marginal: edge not in window");
    double s = 0.0;
    for (std::uint64_t mask = 0; mask < prob.size(); ++mask)
      if (mask & (1ull << bit)) s += prob[mask];
    return s;
  }
};

inline ExactDistribution exact_distribution(const EnergyModel& m, const Window& V, double beta,
                                            std::size_t max_edges = kDefaultMaxExactEdges) {
  if (beta <= 0) throw ConfigError("exact_distribution: beta must be > 0");
  ExactDistribution d;
  d.window = V;
  d.beta = beta;
  d.edges = V.all_edges();
  check_enumeration_guard(d.edges.size(), max_edges);

  const std::uint64_t n = 1ull << d.edges.size();
  d.energy.resize(n);
  for (std::uint64_t mask = 0; mask < n; ++mask)
    d.energy[mask] = m.hamiltonian(state_from_mask(V, d.edges, static_cast<std::uint32_t>(mask)));

  double emin = d.energy[0];
  for (double e : d.energy) emin = std::min(emin, e);
  d.prob.resize(n);
  double z = 0.0;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    d.prob[mask] = std::exp(-beta * (d.energy[mask] - emin));
    z += d.prob[mask];
  }
  for (double& p : d.prob) p /= z;
  d.log_z = std::log(z) - beta * emin;
  return d;
}

// Expectation of f under an exact table.
inline double exact_expectation(const ExactDistribution& d,
                                const std::function<double(const GraphState&)>& f) {
  return d.expectation(f);
}

// Max over states x and edges e of |mu(x0)*rate*Q(e|x0) - mu(x1)|, the
// detailed-balance identity of the birth-death dynamics.
inline double detailed_balance_residual(const EnergyModel& m, const Window& V, double beta,
                                        std::size_t max_edges = kDefaultMaxExactEdges) {
  const auto d = exact_distribution(m, V, beta, max_edges);
  const double M = m.constant_M();
  double worst = 0.0;
  for (std::uint64_t mask = 0; mask < d.prob.size(); ++mask) {
    const auto x = state_from_mask(V, d.edges, static_cast<std::uint32_t>(mask));
    for (std::size_t b = 0; b < d.edges.size(); ++b) {
      if (mask & (1ull << b)) continue;
      const Edge& e = d.edges[b];
      const double up = d.prob[mask] * birth_rate(e, beta, M) * m.acceptance_q(beta, x, e);
      const double down = d.prob[mask | (1ull << b)];
      worst = std::max(worst, std::abs(up - down));
    }
  }
  return worst;
}

// Total variation distance (1/2) sum |p - q| between tables on one support.
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ConfigError("total_variation: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// CSV export: bitmask,probability,energy.
inline void write_distribution_csv(const ExactDistribution& d, std::ostream& os) {
  os << "bitmask,probability,energy\n";
  const auto old = os.precision(17);
  for (std::uint64_t mask = 0; mask < d.prob.size(); ++mask)
    os << mask << ',' << d.prob[mask] << ',' << d.energy[mask] << '\n';
  os.precision(old);
}

}  // namespace sggraph
