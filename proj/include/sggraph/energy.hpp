#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "sggraph/graph_state.hpp"

namespace sggraph {

enum class ModelKind { EdgeOnly, Ferrari, TwoStar };

// Hamiltonian descriptor: H_V(x) = sum_e L(e) x_e + F_V(x).
//
//   EdgeOnly:  F = 0.
//   Ferrari:   F = sum_i phi_i(d_i) with phi(0)=h0, phi(1)=0, phi(d)=h1*C(d,2).
//   TwoStar:   F = (1/2) sum_v sum_{pairs of present edges e,e' at v} L(e)L(e'),
//              the potential whose single-edge increment matches the published
//              two-star acceptance exponent.
//
// The model exposes the local difference dF(x,e) = F(x with e) - F(x without e),
// its uniform lower bound M, and the acceptance probability
// Q(e|x) = exp(-beta*dF + beta*M).
class EnergyModel {
 public:
  static EnergyModel edge_only() { return EnergyModel(ModelKind::EdgeOnly, 0, 0); }

  static EnergyModel ferrari(double h0, double h1) {
    if (!(0 < h0 && h0 < h1))
      throw std::invalid_argument("EnergyModel::ferrari: requires 0 < h0 < h1");
    return EnergyModel(ModelKind::Ferrari, h0, h1);
  }

  static EnergyModel two_star() { return EnergyModel(ModelKind::TwoStar, 0, 0); }

  ModelKind kind() const { return kind_; }
  double h0() const { return h0_; }
  double h1() const { return h1_; }

  // Uniform lower bound M on the local difference. The Ferrari model only
  // satisfies M > -1 (needed by the subcritical theory) when h0 < 1/2.
  double constant_M() const {
    switch (kind_) {
      case ModelKind::EdgeOnly: return 0.0;
      case ModelKind::TwoStar: return 0.0;
      case ModelKind::Ferrari:
        if (h0_ >= 0.5)
          throw std::domain_error(
              "EnergyModel: Ferrari with h0 >= 1/2 gives M = -2*h0 <= -1");
        return -2.0 * h0_;
    }
    throw std::logic_error("unreachable");
  }

  // Full Hamiltonian H_V(x).
  double hamiltonian(const GraphState& x) const {
    double h = 0.0;
    for (const auto& e : x.edges_sorted()) h += edge_length(e);
    return h + sufficient_statistic(x);
  }

  double sufficient_statistic(const GraphState& x) const {
    switch (kind_) {
      case ModelKind::EdgeOnly:
        return 0.0;
      case ModelKind::Ferrari: {
        double f = 0.0;
        for (const Vertex& v : x.window().vertices()) f += phi(x.degree(v));
        return f;
      }
      case ModelKind::TwoStar: {
        // (1/2) sum over vertices of sum over unordered pairs of incident
        // present edges of the length product.
        double f = 0.0;
        for (const Vertex& v : x.window().vertices()) {
          double sum = 0.0, sumsq = 0.0;
          for (const Vertex& n : x.neighbors(v)) {
            const double l = l1_distance(v, n);
            sum += l;
            sumsq += l * l;
          }
          f += 0.25 * (sum * sum - sumsq);
        }
        return f;
      }
    }
    throw std::logic_error("unreachable");
  }

  // dF(x,e) = F(x^1_e) - F(x^0_e). Independent of x_e itself; depends only on
  // edges sharing an endpoint with e.
  double local_difference(const GraphState& x, const Edge& e) const {
    switch (kind_) {
      case ModelKind::EdgeOnly:
        return 0.0;
      case ModelKind::Ferrari: {
        const int di = x.degree(e.a) - (x.has(e) ? 1 : 0);
        const int dj = x.degree(e.b) - (x.has(e) ? 1 : 0);
        return (phi(di + 1) - phi(di)) + (phi(dj + 1) - phi(dj));
      }
      case ModelKind::TwoStar: {
        const double L = edge_length(e);
        double s = 0.0;
        for (const Vertex& n : x.neighbors(e.a))
          if (n != e.b) s += l1_distance(e.a, n);
        for (const Vertex& n : x.neighbors(e.b))
          if (n != e.a) s += l1_distance(e.b, n);
        return 0.5 * L * s;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Same local difference computed from the list of present edges incident to
  // e's endpoints (e itself excluded). Used on neighborhood states assembled
  // from kept rectangles, where no full GraphState exists.
  double local_difference_incident(const Edge& e, std::span<const Edge> incident) const {
    switch (kind_) {
      case ModelKind::EdgeOnly:
        return 0.0;
      case ModelKind::Ferrari: {
        int di = 0, dj = 0;
        for (const Edge& f : incident) {
          if (f == e) continue;
          if (f.contains(e.a)) ++di;
          if (f.contains(e.b)) ++dj;
        }
        return (phi(di + 1) - phi(di)) + (phi(dj + 1) - phi(dj));
      }
      case ModelKind::TwoStar: {
        const double L = edge_length(e);
        double s = 0.0;
        for (const Edge& f : incident) {
          if (f == e) continue;
          if (f.contains(e.a)) s += l1_distance(e.a, f.other(e.a));
          if (f.contains(e.b)) s += l1_distance(e.b, f.other(e.b));
        }
        return 0.5 * L * s;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Q(e|x) = exp(-beta*dF(x,e) + beta*M), a probability by the choice of M.
  double acceptance_q(double beta, const GraphState& x, const Edge& e) const {
    if (beta <= 0) throw std::invalid_argument("acceptance_q: beta must be > 0");
    return std::exp(beta * (constant_M() - local_difference(x, e)));
  }

  double acceptance_q_incident(double beta, const Edge& e,
                               std::span<const Edge> incident) const {
    return std::exp(beta * (constant_M() - local_difference_incident(e, incident)));
  }

  std::string name() const {
    switch (kind_) {
      case ModelKind::EdgeOnly: return "edge";
      case ModelKind::Ferrari: return "ferrari";
      case ModelKind::TwoStar: return "twostar";
    }
    return "?";
  }

 private:
  EnergyModel(ModelKind k, double h0, double h1) : kind_(k), h0_(h0), h1_(h1) {}

  double phi(int d) const {
    if (d == 0) return h0_;
    if (d == 1) return 0.0;
    return h1_ * 0.5 * d * (d - 1);
  }

  ModelKind kind_;
  double h0_;
  double h1_;
};

// Per-edge birth-attempt rate of the graphical construction.
inline double birth_rate(const Edge& e, double beta, double M) {
  return std::exp(-beta * edge_length(e) - beta * M);
}

}  // namespace sggraph
