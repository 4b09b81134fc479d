#pragma once

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "sggraph/clan.hpp"
#include "sggraph/energy.hpp"

namespace sggraph {

struct CleaningResult {
  std::vector<char> kept;  // aligned with clan.rects
  std::size_t kept_count = 0;
};

// Forward cleaning pass over a clan: rectangles are visited in increasing
// birth order (ties broken by basis); each one is kept iff its basis is not
// occupied by an alive kept rectangle and a fresh uniform clears Q evaluated
// on the neighborhood state assembled from alive kept related rectangles.
// A uniform is consumed for every rectangle, kept or not, so decision n always
// reads the n-th variate of the stream.
inline CleaningResult clean_clan(const EnergyModel& m, double beta, const Clan& clan,
                                 Engine& g) {
  const double M = m.constant_M();
  std::vector<std::size_t> order(clan.rects.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ClanRect& ra = clan.rects[a];
    const ClanRect& rb = clan.rects[b];
    if (ra.birth != rb.birth) return ra.birth < rb.birth;
    return ra.basis < rb.basis;
  });

  CleaningResult res;
  res.kept.assign(clan.rects.size(), 0);
  std::unordered_map<Vertex, std::vector<std::size_t>, VertexHash> kept_at;
  std::vector<Edge> incident;

  for (std::size_t idx : order) {
    const ClanRect& r = clan.rects[idx];
    const double u = uniform01(g);

    incident.clear();
    bool occupied = false;
    for (const Vertex& v : {r.basis.a, r.basis.b}) {
      auto it = kept_at.find(v);
      if (it == kept_at.end()) continue;
      for (std::size_t k : it->second) {
        const ClanRect& kr = clan.rects[k];
        if (!kr.alive_at(r.birth)) continue;
        if (kr.basis == r.basis) {
          occupied = true;
        } else if (kr.basis.contains(v)) {
          incident.push_back(kr.basis);
        }
      }
    }
    if (occupied) continue;

    const double q = std::exp(beta * (M - m.local_difference_incident(r.basis, incident)));
    if (u < q) {
      res.kept[idx] = 1;
      ++res.kept_count;
      kept_at[r.basis.a].push_back(idx);
      kept_at[r.basis.b].push_back(idx);
    }
  }
  return res;
}

struct PerfectSampleResult {
  GraphState state;
  Clan clan;
  CleaningResult cleaning;
};

// One exact draw of the measure restricted to the window edges: build the
// backward clan of V, clean it, and read off kept rectangles alive at time 0
// whose basis lies inside the window. With a domain, the construction is
// confined to edges of that finite volume and the draw targets the
// finite-volume Gibbs measure of the domain instead.
inline PerfectSampleResult perfect_sample_detailed(const EnergyModel& m, const Window& V,
                                                   double beta, Engine& g, ClanCaps caps = {},
                                                   std::optional<Window> domain = std::nullopt,
                                                   bool allow_supercritical = false) {
  const double M = m.constant_M();
  ClanSampler sampler(beta, M, caps, std::move(domain), allow_supercritical);
  PerfectSampleResult res{GraphState(V), sampler.sample_window_clan(V, g), {}};
  res.cleaning = clean_clan(m, beta, res.clan, g);
  for (std::size_t i = 0; i < res.clan.rects.size(); ++i) {
    if (!res.cleaning.kept[i]) continue;
    const ClanRect& r = res.clan.rects[i];
    if (r.death() >= 0.0 && V.contains(r.basis.a) && V.contains(r.basis.b) &&
        !res.state.has(r.basis))
      res.state.add(r.basis);
  }
  return res;
}

inline GraphState perfect_sample(const EnergyModel& m, const Window& V, double beta, Engine& g,
                                 ClanCaps caps = {},
                                 std::optional<Window> domain = std::nullopt,
                                 bool allow_supercritical = false) {
  return perfect_sample_detailed(m, V, beta, g, caps, std::move(domain), allow_supercritical)
      .state;
}

// Per-replica wrapper: sample k is drawn from an engine derived from the
// master seed and k, so replicas can run in any order (or concurrently) and
// reproduce byte-identically.
inline Engine replica_engine(std::uint64_t master_seed, std::uint64_t replica) {
  return make_engine(derive_seed(master_seed, stream_tag::replica, replica));
}

// CSV export for space-time diagrams: gen,x1,y1,x2,y2,birth,lifetime,mark,kept.
inline void write_clan_csv(const Clan& clan, const CleaningResult& cleaning, std::ostream& os) {
  os << "gen,x1,y1,x2,y2,birth,lifetime,mark,kept\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < clan.rects.size(); ++i) {
    const ClanRect& r = clan.rects[i];
    os << r.gen << ',' << r.basis.a.x << ',' << r.basis.a.y << ',' << r.basis.b.x << ','
       << r.basis.b.y << ',' << r.birth << ',' << r.lifetime << ',' << r.mark << ','
       << (cleaning.kept.empty() ? 0 : static_cast<int>(cleaning.kept[i])) << '\n';
  }
  os.precision(old);
}

}  // namespace sggraph
