#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sggraph/analysis.hpp"
#include "sggraph/energy.hpp"
#include "sggraph/errors.hpp"
#include "sggraph/graph_state.hpp"
#include "sggraph/rng.hpp"

namespace sggraph {

struct ClanCaps {
  std::size_t max_rectangles = 1'000'000;
  double max_time_depth = 1e4;
};

// Rectangle of a backward clan, with its ancestry generation: 1 for rectangles
// rooted directly at the origin (alive at time 0 on a root edge or a window
// edge), n+1 for ancestors recruited by a generation-n rectangle.
struct ClanRect {
  Edge basis;
  double birth = 0.0;     // <= 0
  double lifetime = 0.0;  // reaches the earliest related birth (or 0) by construction
  double mark = 0.0;
  int gen = 1;

  double death() const { return birth + lifetime; }
  bool alive_at(double t) const { return birth <= t && t <= death(); }
};

// TI(H, V, e): earliest birth among rectangles of H whose basis relates to e;
// 0 when there is none (min of the empty set).
inline double ti(const std::vector<ClanRect>& H, const Edge& e) {
  double m = 0.0;
  for (const ClanRect& r : H)
    if (relates(r.basis, e)) m = std::min(m, r.birth);
  return m;
}

// Finite clan of ancestors A^{V,0} (window root) or A^{ij,0} (edge root),
// rectangles in insertion order, i.e. strictly decreasing birth times.
struct Clan {
  std::vector<ClanRect> rects;
  std::optional<Window> root_window;
  std::vector<Edge> root_edges;
  std::size_t proposals = 0;

  // Backward temporal depth: distance from time 0 to the earliest birth.
  double time_length() const {
    double m = 0.0;
    for (const ClanRect& r : rects) m = std::min(m, r.birth);
    return -m;
  }

  // Max L1 distance from the origin (window vertices / root edge endpoints)
  // to any clan basis.
  int space_diameter() const {
    std::vector<Vertex> origin;
    if (root_window) origin = root_window->vertices();
    for (const Edge& e : root_edges) {
      origin.push_back(e.a);
      origin.push_back(e.b);
    }
    int sd = 0;
    for (const ClanRect& r : rects)
      sd = std::max(sd, set_distance(origin, {r.basis.a, r.basis.b}));
    return sd;
  }

  bool touches_root(const Edge& basis) const {
    if (root_window && (root_window->contains(basis.a) || root_window->contains(basis.b)))
      return true;
    for (const Edge& e : root_edges)
      if (e == basis) return true;
    return false;
  }
};

// Clan closure: every rectangle either reaches time 0 on a root-touching
// basis, or reaches the birth of some later-born related clan member.
inline bool validate_clan(const Clan& clan) {
  for (std::size_t i = 0; i < clan.rects.size(); ++i) {
    const ClanRect& r = clan.rects[i];
    if (clan.touches_root(r.basis) && r.death() >= 0.0) continue;
    bool ok = false;
    for (std::size_t j = 0; j < i && !ok; ++j) {
      const ClanRect& later = clan.rects[j];
      ok = later.birth > r.birth && relates(later.basis, r.basis) && r.death() >= later.birth;
    }
    if (!ok) return false;
  }
  return true;
}

namespace detail {

// Fenwick tree over nonnegative weights with prefix sampling.
class Fenwick {
 public:
  std::size_t size() const { return values_.size(); }

  std::size_t push_back(double v) {
    values_.push_back(0.0);
    tree_.push_back(0.0);
    // Node at 1-based position i covers [i - lowbit(i) + 1, i]; fold the
    // already-stored values of that range into the new node.
    const std::size_t i = tree_.size();
    const std::size_t lo = i - (i & (~i + 1)) + 1;
    double s = 0.0;
    for (std::size_t k = lo; k < i; ++k) s += values_[k - 1];
    tree_[i - 1] = s;
    set(values_.size() - 1, v);
    return values_.size() - 1;
  }

  void set(std::size_t idx, double v) {
    const double delta = v - values_[idx];
    values_[idx] = v;
    for (std::size_t i = idx + 1; i <= tree_.size(); i += i & (~i + 1)) tree_[i - 1] += delta;
  }

  double value(std::size_t idx) const { return values_[idx]; }

  double total() const {
    double s = 0.0;
    for (std::size_t i = tree_.size(); i > 0; i -= i & (~i + 1)) s += tree_[i - 1];
    return s;
  }

  // Smallest index with prefix sum exceeding target.
  std::size_t sample(double target) const {
    std::size_t pos = 0;
    std::size_t mask = 1;
    while (mask <= tree_.size()) mask <<= 1;
    mask >>= 1;
    for (; mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= tree_.size() && tree_[next - 1] < target) {
        target -= tree_[next - 1];
        pos = next;
      }
    }
    return std::min(pos, values_.size() - 1);
  }

  void scale_all(double factor) {
    for (double& v : values_) v *= factor;
    rebuild();
  }

 private:
  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
      for (std::size_t i = idx + 1; i <= tree_.size(); i += i & (~i + 1))
        tree_[i - 1] += values_[idx];
    }
  }

  std::vector<double> values_;
  std::vector<double> tree_;
};

// Inverse-CDF sampler for the shell distribution P(s) proportional to
// 4 s e^{-beta s}, the law of the L1 distance of a candidate edge endpoint.
// Shells are walked until the remaining tail mass drops below 1e-15 of the
// total, which is computed in closed form.
class ShellSampler {
 public:
  explicit ShellSampler(double beta) : beta_(beta), u_(std::exp(-beta)) {
    total_ = 4.0 * u_ / ((1.0 - u_) * (1.0 - u_));
    double tail = total_;
    int s = 0;
    while (tail > 1e-15 * total_) {
      ++s;
      tail -= 4.0 * s * std::pow(u_, s);
    }
    s_max_ = std::max(1, s);
  }

  double total_rate() const { return total_; }  // sum over j != i of e^{-beta L(i,j)}

  int sample(Engine& g) const {
    double target = uniform01(g) * total_;
    double w = 4.0 * u_;  // 4*1*u^1
    for (int s = 1; s < s_max_; ++s) {
      if (target < w) return s;
      target -= w;
      w = 4.0 * (s + 1) * std::pow(u_, s + 1);
    }
    return s_max_;
  }

 private:
  double beta_;
  double u_;
  double total_ = 0.0;
  int s_max_ = 1;
};

}  // namespace detail

// Backward construction of the clan of ancestors, the time-reversed view of
// the rectangle process. Candidate edges form an infinite set (every edge
// meeting the current clan or the root); they are never materialized.
// Instead, each active vertex w carries the closed-form total rate of its
// incident candidate edges, a proposal is drawn by (vertex, shell, position)
// inverse-CDF sampling, and the survival requirement -- the new rectangle's
// lifespan must reach the earliest birth among related clan members, or time 0
// for root-touching edges -- is applied by thinning. The proposal clock is the
// defective exponential of the evolution equation, so the construction
// terminates exactly when no further ancestor can qualify.
class ClanSampler {
 public:
  ClanSampler(double beta, double M, ClanCaps caps = {},
              std::optional<Window> domain = std::nullopt, bool allow_supercritical = false)
      : beta_(beta), M_(M), caps_(caps), domain_(std::move(domain)), shells_(beta) {
    if (beta <= 0) throw std::invalid_argument("ClanSampler: beta must be > 0");
    if (!allow_supercritical && alpha(beta, M) >= 1.0)
      throw GuardError("ClanSampler: alpha(beta) = " + std::to_string(alpha(beta, M)) +
                       " >= 1 (beta <= beta*); pass allow_supercritical to override");
    lambda1_ = shells_.total_rate() * std::exp(-beta_ * M_);  // alpha/2
  }

  // Clan of a finite window: first generation lives on edges meeting V.
  Clan sample_window_clan(const Window& V, Engine& g) {
    reset();
    clan_.root_window = V;
    for (const Vertex& v : V.vertices()) {
      if (domain_ && !domain_->contains(v))
        throw std::invalid_argument("ClanSampler: root window outside domain");
      touch_vertex(v, 0.0, -1);
    }
    build(g);
    if (!validate_clan(clan_)) throw std::logic_error("clan closure invariant violated");
    return std::move(clan_);
  }

  // Clan of explicit root edges: first generation lives on those edges only.
  Clan sample_edge_clan(const std::vector<Edge>& roots, Engine& g) {
    reset();
    clan_.root_edges = roots;
    for (const Edge& e : roots) {
      if (domain_ && !(domain_->contains(e.a) && domain_->contains(e.b)))
        throw std::invalid_argument("ClanSampler: root edge outside domain");
      root_rate_ += birth_rate(e, beta_, M_);
      active_roots_.push_back(e);
    }
    build(g);
    if (!validate_clan(clan_)) throw std::logic_error("clan closure invariant violated");
    return std::move(clan_);
  }

 private:
  struct VertexEntry {
    double k = 0.0;   // earliest related birth at this vertex, 0 for bare roots
    int argmin = -1;  // clan index of the rectangle attaining k, -1 for roots
  };

  void reset() {
    clan_ = Clan{};
    table_.clear();
    entries_.clear();
    fenwick_ = detail::Fenwick();
    log_base_ = 0.0;
    tau_ = 0.0;
    root_rate_ = 0.0;
    active_roots_.clear();
  }

  // Insert or refresh a vertex whose earliest related birth is now `k`.
  void touch_vertex(const Vertex& v, double k, int argmin) {
    auto [it, inserted] = table_.try_emplace(v, entries_.size());
    if (inserted) {
      entries_.push_back({k, argmin});
      fenwick_.push_back(weight_for(k));
    } else {
      entries_[it->second] = {k, argmin};
      fenwick_.set(it->second, weight_for(k));
    }
  }

  double weight_for(double k) const { return std::exp(-k - log_base_); }

  void maybe_rebase() {
    if (tau_ - log_base_ > 600.0) {
      const double shift = tau_ - log_base_;
      fenwick_.scale_all(std::exp(-shift));
      log_base_ = tau_;
    }
  }

  void build(Engine& g) {
    std::vector<Vertex> index_to_vertex(table_.size());  // parallel to entries_
    for (const auto& [v, idx] : table_) index_to_vertex[idx] = v;

    for (;;) {
      // Total proposal intensity at depth tau is e^{-tau} * K with
      // K = lambda1 * sum_w e^{-k_w} + sum_active_roots lambda_e.
      const double S = fenwick_.total();
      double log_vertex_part = -std::numeric_limits<double>::infinity();
      if (S > 0) log_vertex_part = std::log(lambda1_) + log_base_ + std::log(S);
      double log_k;
      if (root_rate_ > 0) {
        const double lr = std::log(root_rate_);
        const double hi = std::max(log_vertex_part, lr);
        log_k = hi + std::log(std::exp(log_vertex_part - hi) + std::exp(lr - hi));
      } else {
        log_k = log_vertex_part;
      }

      const double e = exponential1(g);
      const double log_r = std::log(e) + tau_ - log_k;
      if (!(log_r < 0.0)) break;  // remaining hazard mass exhausted
      tau_ -= std::log1p(-std::exp(log_r));
      if (tau_ > caps_.max_time_depth)
        throw CapExceededError("clan explosion: time depth cap exceeded", clan_.rects.size(),
                               tau_);
      ++clan_.proposals;

      // Branch between vertex streams and still-active root edges.
      const double p_vertex = std::exp(log_vertex_part - log_k);
      Edge basis{{0, 0}, {1, 0}};
      double ti_eff = 0.0;
      int parent = -1;
      if (uniform01(g) < p_vertex) {
        const std::size_t widx = fenwick_.sample(uniform01(g) * S);
        const Vertex w = index_to_vertex[widx];
        const int s = shells_.sample(g);
        const Vertex j = shell_vertex(w, s, static_cast<int>(uniform_below(g, 4ull * s)));
        if (domain_ && !domain_->contains(j)) continue;
        basis = Edge(w, j);
        const VertexEntry& we = entries_[widx];
        auto jt = table_.find(j);
        if (jt != table_.end()) {
          const VertexEntry& je = entries_[jt->second];
          // Both endpoint streams propose this edge; keep max/total of the
          // endpoint weights so the superposition matches the target hazard.
          const double p_keep = 1.0 / (1.0 + std::exp(-std::abs(we.k - je.k)));
          if (uniform01(g) >= p_keep) continue;
          ti_eff = std::min(we.k, je.k);
          parent = we.k <= je.k ? we.argmin : je.argmin;
        } else {
          ti_eff = we.k;
          parent = we.argmin;
        }
      } else {
        double target = uniform01(g) * root_rate_;
        std::size_t pick = active_roots_.size() - 1;
        for (std::size_t i = 0; i < active_roots_.size(); ++i) {
          const double w = birth_rate(active_roots_[i], beta_, M_);
          if (target < w) {
            pick = i;
            break;
          }
          target -= w;
        }
        basis = active_roots_[pick];
        ti_eff = 0.0;
        parent = -1;
      }

      ClanRect r;
      r.basis = basis;
      r.birth = -tau_;
      r.lifetime = (tau_ + ti_eff) + exponential1(g);
      r.mark = uniform_open01(g);
      r.gen = parent >= 0 ? clan_.rects[parent].gen + 1 : 1;
      if (!clan_.rects.empty() && r.birth >= clan_.rects.back().birth)
        throw std::logic_error("clan frontier not strictly decreasing");
      clan_.rects.push_back(r);
      if (clan_.rects.size() > caps_.max_rectangles)
        throw CapExceededError("clan explosion: rectangle cap exceeded", clan_.rects.size(),
                               tau_);

      maybe_rebase();
      const int self = static_cast<int>(clan_.rects.size()) - 1;
      for (const Vertex& v : {basis.a, basis.b}) {
        const bool known = table_.count(v) != 0;
        touch_vertex(v, -tau_, self);
        if (!known) {
          if (table_.at(v) >= index_to_vertex.size()) index_to_vertex.resize(table_.at(v) + 1);
          index_to_vertex[table_.at(v)] = v;
        }
      }
      if (!active_roots_.empty()) {
        for (std::size_t i = 0; i < active_roots_.size();) {
          if (relates(active_roots_[i], basis)) {
            root_rate_ -= birth_rate(active_roots_[i], beta_, M_);
            active_roots_.erase(active_roots_.begin() + static_cast<std::ptrdiff_t>(i));
          } else {
            ++i;
          }
        }
        if (active_roots_.empty()) root_rate_ = 0.0;
      }
    }
  }

  double beta_;
  double M_;
  ClanCaps caps_;
  std::optional<Window> domain_;
  detail::ShellSampler shells_;
  double lambda1_ = 0.0;

  Clan clan_;
  std::unordered_map<Vertex, std::size_t, VertexHash> table_;
  std::vector<VertexEntry> entries_;
  detail::Fenwick fenwick_;
  double log_base_ = 0.0;
  double tau_ = 0.0;
  double root_rate_ = 0.0;
  std::vector<Edge> active_roots_;
};

// Convenience wrappers matching the construction's two root shapes.
inline Clan sample_backward_clan(const Window& V, double beta, double M, Engine& g,
                                 ClanCaps caps = {},
                                 std::optional<Window> domain = std::nullopt,
                                 bool allow_supercritical = false) {
  ClanSampler s(beta, M, caps, std::move(domain), allow_supercritical);
  return s.sample_window_clan(V, g);
}

inline Clan sample_backward_clan_for_edge(const Edge& e, double beta, double M, Engine& g,
                                          ClanCaps caps = {},
                                          std::optional<Window> domain = std::nullopt,
                                          bool allow_supercritical = false) {
  ClanSampler s(beta, M, caps, std::move(domain), allow_supercritical);
  return s.sample_edge_clan({e}, g);
}

}  // namespace sggraph
