#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sggraph/analysis.hpp"
#include "sggraph/energy.hpp"
#include "sggraph/exact.hpp"
#include "sggraph/rectangles.hpp"

namespace sggraph {

inline constexpr double kMaxHorizon = 1e12;

enum class EventKind : std::uint8_t { Birth = 0, Death = 1 };

struct Event {
  double time;
  std::size_t edge_idx;  // canonical index into the window edge list
  EventKind kind;
  std::size_t rect_id;  // death events refer back to the rectangle they end
};

// Tie-break order: (time, edge canonical order, birth before death).
struct EventAfter {
  bool operator()(const Event& l, const Event& r) const {
    if (l.time != r.time) return l.time > r.time;
    if (l.edge_idx != r.edge_idx) return l.edge_idx > r.edge_idx;
    return l.kind > r.kind;
  }
};

struct TraceRow {
  double time;
  EventKind kind;
  Edge edge;
  double mark;
  bool accepted;
};

// CSV export consumed by external plotting: time,kind,x1,y1,x2,y2,mark,accepted.
inline void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os) {
  os << "time,kind,x1,y1,x2,y2,mark,accepted\n";
  const auto old = os.precision(17);
  for (const TraceRow& r : trace) {
    os << r.time << ',' << (r.kind == EventKind::Birth ? "birth" : "death") << ',' << r.edge.a.x
       << ',' << r.edge.a.y << ',' << r.edge.b.x << ',' << r.edge.b.y << ',' << r.mark << ','
       << (r.accepted ? 1 : 0) << '\n';
  }
  os.precision(old);
}

struct ForwardResult {
  GraphState state;
  std::vector<Rectangle> kept;
  std::size_t events = 0;
};

struct CoupledResult {
  GraphState dependent;
  MultigraphState free;
  std::size_t events = 0;
  std::size_t violations = 0;
};

namespace detail {

// Lazily merged per-edge birth streams plus a shared death queue, processed in
// event order. The visitor decides what a birth does; deaths call back with
// the rectangle id.
class EventLoop {
 public:
  EventLoop(std::vector<Edge> edges, double beta, double M, std::uint64_t master_seed)
      : edges_(std::move(edges)), beta_(beta), M_(M) {
    if (beta <= 0) throw std::invalid_argument("EventLoop: beta must be > 0");
    engines_.reserve(edges_.size());
    rates_.reserve(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      engines_.push_back(make_engine(derive_seed(master_seed, stream_tag::edge_births,
                                                 pack_coords(e.a.x, e.a.y),
                                                 pack_coords(e.b.x, e.b.y))));
      rates_.push_back(birth_rate(e, beta_, M_));
      schedule_next_birth(i, 0.0);
    }
  }

  const std::vector<Edge>& edges() const { return edges_; }

  // Registers a rectangle already alive at its birth and schedules its death.
  std::size_t add_rectangle(const Rectangle& r, std::size_t edge_idx) {
    rects_.push_back(r);
    queue_.push({r.death(), edge_idx, EventKind::Death, rects_.size() - 1});
    return rects_.size() - 1;
  }

  const Rectangle& rectangle(std::size_t id) const { return rects_[id]; }

  // Runs to the horizon. on_birth(edge_idx, rect_id) -> bool (kept flag used
  // only for tracing); on_death(edge_idx, rect_id).
  template <typename OnBirth, typename OnDeath>
  std::size_t run(double horizon, OnBirth&& on_birth, OnDeath&& on_death,
                  std::vector<TraceRow>* trace = nullptr) {
    if (horizon < 0 || horizon > kMaxHorizon)
      throw std::invalid_argument("EventLoop: horizon out of range");
    std::size_t n_events = 0;
    while (!queue_.empty() && queue_.top().time <= horizon) {
      const Event ev = queue_.top();
      queue_.pop();
      ++n_events;
      if (ev.kind == EventKind::Birth) {
        // Materialize the rectangle for this birth, then schedule the next one
        // on the same stream.
        Engine& g = engines_[ev.edge_idx];
        Rectangle r{edges_[ev.edge_idx], ev.time, exponential1(g), uniform_open01(g)};
        schedule_next_birth(ev.edge_idx, ev.time);
        const std::size_t id = rects_.size();
        rects_.push_back(r);
        const bool accepted = on_birth(ev.edge_idx, id);
        if (trace) trace->push_back({ev.time, EventKind::Birth, r.basis, r.mark, accepted});
      } else {
        on_death(ev.edge_idx, ev.rect_id);
        if (trace)
          trace->push_back({ev.time, EventKind::Death, edges_[ev.edge_idx],
                            rects_[ev.rect_id].mark, false});
      }
    }
    return n_events;
  }

  void schedule_death(std::size_t edge_idx, std::size_t rect_id) {
    queue_.push({rects_[rect_id].death(), edge_idx, EventKind::Death, rect_id});
  }

 private:
  void schedule_next_birth(std::size_t edge_idx, double from) {
    const double t = from + exponential(engines_[edge_idx], rates_[edge_idx]);
    queue_.push({t, edge_idx, EventKind::Birth, 0});
  }

  std::vector<Edge> edges_;
  double beta_;
  double M_;
  std::vector<Engine> engines_;
  std::vector<double> rates_;
  std::vector<Rectangle> rects_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
};

}  // namespace detail

// Dependent process on X^V per the finite-volume construction: births are
// accepted iff the edge is absent and the rectangle mark clears Q; deaths of
// kept rectangles delete their edge.
inline ForwardResult simulate_dependent(const EnergyModel& m, const Window& V, double beta,
                                        const GraphState& x0, double horizon,
                                        std::uint64_t master_seed,
                                        std::vector<TraceRow>* trace = nullptr) {
  const double M = m.constant_M();
  detail::EventLoop loop(V.all_edges(), beta, M, master_seed);
  ForwardResult res{GraphState(V), {}, 0};
  for (const Edge& e : x0.edges_sorted()) res.state.add(e);

  // Initial rectangles are kept unconditionally.
  std::size_t edge_idx = 0;
  for (const Rectangle& r : initial_rectangles(x0, master_seed)) {
    while (loop.edges()[edge_idx] != r.basis) ++edge_idx;
    loop.add_rectangle(r, edge_idx);
    res.kept.push_back(r);
  }

  res.events = loop.run(
      horizon,
      [&](std::size_t idx, std::size_t id) {
        const Rectangle& r = loop.rectangle(id);
        const Edge& e = loop.edges()[idx];
        if (!res.state.has(e) && r.mark < m.acceptance_q(beta, res.state, e)) {
          res.state.add(e);
          loop.schedule_death(idx, id);
          res.kept.push_back(r);
          return true;
        }
        return false;
      },
      [&](std::size_t idx, std::size_t) { res.state.remove(loop.edges()[idx]); }, trace);
  return res;
}

// Free (independent multigraph) process: every birth is added, every rectangle
// death decrements its edge count. Marginally per edge this is an immigration-
// death chain with Poisson(e^{-beta L - beta M}) stationary law.
inline MultigraphState simulate_free(const Window& V, double beta, double M,
                                     const MultigraphState& z0, double horizon,
                                     std::uint64_t master_seed) {
  detail::EventLoop loop(V.all_edges(), beta, M, master_seed);
  MultigraphState z = z0;

  // Initial rectangles: one per parallel edge, drawn from the per-edge
  // initial-rectangle stream.
  std::size_t edge_idx = 0;
  for (const Edge& e : loop.edges()) {
    const int c = z0.count(e);
    if (c > 0) {
      Engine g = make_engine(derive_seed(master_seed, stream_tag::initial_rects,
                                         pack_coords(e.a.x, e.a.y), pack_coords(e.b.x, e.b.y)));
      for (int k = 0; k < c; ++k)
        loop.add_rectangle({e, 0.0, exponential1(g), uniform_open01(g)}, edge_idx);
    }
    ++edge_idx;
  }

  loop.run(
      horizon,
      [&](std::size_t idx, std::size_t id) {
        z.increment(loop.edges()[idx]);
        loop.schedule_death(idx, id);
        return true;
      },
      [&](std::size_t idx, std::size_t) { z.decrement(loop.edges()[idx]); });
  return z;
}

// Dependent and free processes driven by the identical rectangle stream and
// shared initial rectangles on common edges. The dependent state must stay
// below the free counts at every event; violations are counted, never sampled.
inline CoupledResult coupled_run(const EnergyModel& m, const Window& V, double beta,
                                 const GraphState& x0, const MultigraphState& z0, double horizon,
                                 std::uint64_t master_seed) {
  const double M = m.constant_M();
  detail::EventLoop loop(V.all_edges(), beta, M, master_seed);
  CoupledResult res{GraphState(V), {}, 0, 0};
  std::vector<std::size_t> owner(V.all_edges().size(), SIZE_MAX);

  const auto& edges = loop.edges();
  std::vector<int> dep_has(edges.size(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const int c = z0.count(edges[i]);
    const bool in_dep = x0.has(edges[i]);
    if (in_dep && c < 1)
      throw std::invalid_argument("coupled_run: initial states must satisfy x0 <= z0");
    if (in_dep) {
      res.dependent.add(edges[i]);
      dep_has[i] = 1;
    }
    if (c > 0) {
      Engine g = make_engine(derive_seed(master_seed, stream_tag::initial_rects,
                                         pack_coords(edges[i].a.x, edges[i].a.y),
                                         pack_coords(edges[i].b.x, edges[i].b.y)));
      for (int k = 0; k < c; ++k) {
        const std::size_t id =
            loop.add_rectangle({edges[i], 0.0, exponential1(g), uniform_open01(g)}, i);
        res.free.increment(edges[i]);
        // The first initial rectangle on a common edge is shared.
        if (k == 0 && in_dep) owner[i] = id;
      }
    }
  }

  auto check = [&](std::size_t idx) {
    if (dep_has[idx] > res.free.count(edges[idx])) ++res.violations;
  };

  res.events = loop.run(
      horizon,
      [&](std::size_t idx, std::size_t id) {
        const Rectangle& r = loop.rectangle(id);
        res.free.increment(edges[idx]);
        loop.schedule_death(idx, id);
        bool kept = false;
        if (!dep_has[idx] && r.mark < m.acceptance_q(beta, res.dependent, edges[idx])) {
          res.dependent.add(edges[idx]);
          dep_has[idx] = 1;
          owner[idx] = id;
          kept = true;
        }
        check(idx);
        return kept;
      },
      [&](std::size_t idx, std::size_t id) {
        res.free.decrement(edges[idx]);
        if (owner[idx] == id) {
          res.dependent.remove(edges[idx]);
          dep_has[idx] = 0;
          owner[idx] = SIZE_MAX;
        }
        check(idx);
      });
  return res;
}

struct ErgodicEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;
  std::size_t events = 0;
};

// Time-weighted path average of f over (burn, horizon], with a batch-means
// standard error.
inline ErgodicEstimate ergodic_average(const EnergyModel& m, const Window& V, double beta,
                                       const std::function<double(const GraphState&)>& f,
                                       double burn, double horizon, std::uint64_t master_seed,
                                       std::size_t n_batches = 100) {
  if (!(horizon > burn) || burn < 0)
    throw std::invalid_argument("ergodic_average: need horizon > burn >= 0");
  const double M = m.constant_M();
  detail::EventLoop loop(V.all_edges(), beta, M, master_seed);
  GraphState x(V);

  const double batch_len = (horizon - burn) / static_cast<double>(n_batches);
  std::vector<double> batch_integral(n_batches, 0.0);
  double prev_t = 0.0;
  double fx = f(x);
  std::size_t cur_batch = 0;

  auto accumulate = [&](double upto) {
    // Spread f(x)*(upto - prev_t) over the batches it overlaps. The batch
    // cursor only moves forward, so the walk always terminates.
    double a = std::max(prev_t, burn);
    if (upto > a) {
      for (;;) {
        const double boundary = burn + static_cast<double>(cur_batch + 1) * batch_len;
        if (upto <= boundary || cur_batch == n_batches - 1) {
          batch_integral[cur_batch] += fx * (upto - a);
          break;
        }
        batch_integral[cur_batch] += fx * (boundary - a);
        a = boundary;
        ++cur_batch;
      }
    }
    prev_t = upto;
  };

  const std::size_t events = loop.run(
      horizon,
      [&](std::size_t idx, std::size_t id) {
        const Rectangle& r = loop.rectangle(id);
        const Edge& e = loop.edges()[idx];
        accumulate(r.birth);
        if (!x.has(e) && r.mark < m.acceptance_q(beta, x, e)) {
          x.add(e);
          loop.schedule_death(idx, id);
          fx = f(x);
          return true;
        }
        return false;
      },
      [&](std::size_t idx, std::size_t id) {
        accumulate(loop.rectangle(id).death());
        x.remove(loop.edges()[idx]);
        fx = f(x);
      });
  accumulate(horizon);

  ErgodicEstimate est;
  est.batches = n_batches;
  est.events = events;
  double mean = 0.0;
  for (double v : batch_integral) mean += v / batch_len;
  mean /= static_cast<double>(n_batches);
  double var = 0.0;
  for (double v : batch_integral) {
    const double d = v / batch_len - mean;
    var += d * d;
  }
  var /= static_cast<double>(n_batches - 1);
  est.mean = mean;
  est.std_error = std::sqrt(var / static_cast<double>(n_batches));
  return est;
}

}  // namespace sggraph
