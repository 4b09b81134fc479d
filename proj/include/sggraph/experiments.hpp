#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sggraph/analysis.hpp"
#include "sggraph/exact.hpp"
#include "sggraph/perfect.hpp"
#include "sggraph/stats.hpp"

namespace sggraph {

// Monte Carlo harnesses shared by the CLI and the acceptance suite. Each one
// runs independent replicas (per-replica derived seeds) and reports empirical
// quantities next to the closed-form bounds they must respect.

struct TailCheck {
  double threshold = 0.0;  // k for SD, t for TL
  double empirical = 0.0;
  double bound = 0.0;
  double sigma = 0.0;  // binomial sigma at the bound
  bool ok = false;
};

struct ClanTailReport {
  std::size_t replicas = 0;
  double beta = 0.0;
  double beta_tilde = 0.0;
  double M = 0.0;
  std::vector<TailCheck> sd;
  std::vector<TailCheck> tl;
  double mean_rectangles = 0.0;
  bool all_ok = true;
};

// Empirical SD/TL tails of vertex- and edge-rooted clans against the
// Proposition-1 bounds (plus 3 binomial sigma). The TL check uses the
// single-edge clan with unit basis; SD uses the single-vertex clan.
inline ClanTailReport clan_tail_experiment(double beta, double M, std::size_t replicas,
                                           std::uint64_t master_seed,
                                           const std::vector<int>& sd_ks = {1, 2, 3, 4, 5},
                                           const std::vector<double>& tl_ts = {0.5, 1, 2, 3, 5},
                                           ClanCaps caps = {}) {
  ClanTailReport rep;
  rep.replicas = replicas;
  rep.beta = beta;
  rep.M = M;
  rep.beta_tilde = default_beta_tilde(beta, M);

  const Window v0 = Window::from_vertices({{0, 0}});
  const Edge e0({0, 0}, {1, 0});
  std::vector<std::size_t> sd_exceed(sd_ks.size(), 0);
  std::vector<std::size_t> tl_exceed(tl_ts.size(), 0);
  double rect_total = 0.0;

  for (std::uint64_t r = 0; r < replicas; ++r) {
    Engine g = replica_engine(master_seed, r);
    const Clan cv = sample_backward_clan(v0, beta, M, g, caps);
    const int sd = cv.space_diameter();
    for (std::size_t i = 0; i < sd_ks.size(); ++i)
      if (sd > sd_ks[i]) ++sd_exceed[i];
    rect_total += static_cast<double>(cv.rects.size());

    const Clan ce = sample_backward_clan_for_edge(e0, beta, M, g, caps);
    const double tl = ce.time_length();
    for (std::size_t i = 0; i < tl_ts.size(); ++i)
      if (tl > tl_ts[i]) ++tl_exceed[i];
  }
  rep.mean_rectangles = rect_total / static_cast<double>(replicas);

  for (std::size_t i = 0; i < sd_ks.size(); ++i) {
    TailCheck c;
    c.threshold = sd_ks[i];
    c.empirical = static_cast<double>(sd_exceed[i]) / static_cast<double>(replicas);
    c.bound = std::min(1.0, sd_tail_bound(ClanRootKind::VertexRoot, sd_ks[i], beta,
                                          rep.beta_tilde, M));
    c.sigma = binomial_sigma(c.bound, replicas);
    c.ok = c.empirical <= c.bound + 3.0 * c.sigma;
    rep.all_ok = rep.all_ok && c.ok;
    rep.sd.push_back(c);
  }
  for (std::size_t i = 0; i < tl_ts.size(); ++i) {
    TailCheck c;
    c.threshold = tl_ts[i];
    c.empirical = static_cast<double>(tl_exceed[i]) / static_cast<double>(replicas);
    c.bound = std::min(1.0, tl_tail_bound(1, 1.0, tl_ts[i], beta, M));
    c.sigma = binomial_sigma(c.bound, replicas);
    c.ok = c.empirical <= c.bound + 3.0 * c.sigma;
    rep.all_ok = rep.all_ok && c.ok;
    rep.tl.push_back(c);
  }
  return rep;
}

struct EdgeMarginal {
  Edge edge;
  double empirical = 0.0;
  double sigma = 0.0;
  double free_bound = 0.0;  // e^{-beta L - beta M}
};

struct PerfectEnsemble {
  std::size_t replicas = 0;
  std::vector<EdgeMarginal> marginals;
  std::map<int, std::size_t> degree_histogram;  // over window vertices
  std::map<std::size_t, std::size_t> clan_size_histogram;
  double mean_degree = 0.0;
  double mean_degree_sigma = 0.0;
  double degree_bound = 0.0;  // alpha(beta)/2
  std::vector<double> state_table;  // 8/16/... -entry table when |E_W| <= 20
  std::vector<Edge> window_edges;
};

// Ensemble of perfect samples of a window: per-edge frequencies, degree and
// clan-size histograms, and (for small windows) the full joint state table.
inline PerfectEnsemble perfect_ensemble(const EnergyModel& m, const Window& V, double beta,
                                        std::size_t replicas, std::uint64_t master_seed,
                                        ClanCaps caps = {},
                                        std::optional<Window> domain = std::nullopt) {
  PerfectEnsemble ens;
  ens.replicas = replicas;
  ens.window_edges = V.all_edges();
  const double M = m.constant_M();
  const bool small = ens.window_edges.size() <= 20;
  if (small) ens.state_table.assign(1ull << ens.window_edges.size(), 0.0);

  std::vector<std::size_t> present(ens.window_edges.size(), 0);
  double deg_sum = 0.0, deg_sumsq = 0.0;
  const double n_vertex_obs = static_cast<double>(replicas * V.size());

  for (std::uint64_t r = 0; r < replicas; ++r) {
    Engine g = replica_engine(master_seed, r);
    const auto res = perfect_sample_detailed(m, V, beta, g, caps, domain);
    ++ens.clan_size_histogram[res.clan.rects.size()];
    std::size_t mask = 0;
    for (std::size_t b = 0; b < ens.window_edges.size(); ++b) {
      if (res.state.has(ens.window_edges[b])) {
        ++present[b];
        mask |= 1ull << b;
      }
    }
    if (small) ens.state_table[mask] += 1.0 / static_cast<double>(replicas);
    for (const Vertex& v : V.vertices()) {
      const int d = res.state.degree(v);
      ++ens.degree_histogram[d];
      deg_sum += d;
      deg_sumsq += static_cast<double>(d) * d;
    }
  }

  for (std::size_t b = 0; b < ens.window_edges.size(); ++b) {
    EdgeMarginal em;
    em.edge = ens.window_edges[b];
    em.empirical = static_cast<double>(present[b]) / static_cast<double>(replicas);
    em.sigma = binomial_sigma(em.empirical, replicas);
    em.free_bound = birth_rate(em.edge, beta, M);
    ens.marginals.push_back(em);
  }
  ens.mean_degree = deg_sum / n_vertex_obs;
  const double var = deg_sumsq / n_vertex_obs - ens.mean_degree * ens.mean_degree;
  // Degrees of different vertices in one draw are dependent; use the
  // conservative per-replica batching for the sigma.
  ens.mean_degree_sigma =
      std::sqrt(std::max(var, 0.0) / static_cast<double>(replicas)) /
      std::sqrt(static_cast<double>(V.size()));
  ens.degree_bound = expected_degree_bound(beta, M);
  return ens;
}

// Covariance estimates mu(f tau_i f) - mu(f) mu(tau_i f) from an ensemble of
// draws; f is a per-vertex functional evaluated at the origin and at each
// translation.
struct CovarianceEstimate {
  Vertex translation;
  double covariance = 0.0;
  double std_error = 0.0;
};

inline std::vector<CovarianceEstimate> empirical_covariance(
    const std::vector<GraphState>& samples,
    const std::function<double(const GraphState&, const Vertex&)>& f,
    const std::vector<Vertex>& translations, const Vertex& base = {0, 0}) {
  if (samples.size() < 100)
    throw GuardError("empirical_covariance: need at least 100 samples");
  const double n = static_cast<double>(samples.size());
  std::vector<CovarianceEstimate> out;
  for (const Vertex& t : translations) {
    const Vertex shifted{base.x + t.x, base.y + t.y};
    double m0 = 0.0, mt = 0.0;
    std::vector<double> prod(samples.size());
    std::vector<double> f0(samples.size()), ft(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      f0[s] = f(samples[s], base);
      ft[s] = f(samples[s], shifted);
      m0 += f0[s];
      mt += ft[s];
    }
    m0 /= n;
    mt /= n;
    CovarianceEstimate ce;
    ce.translation = t;
    double var = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      prod[s] = (f0[s] - m0) * (ft[s] - mt);
      ce.covariance += prod[s];
    }
    ce.covariance /= n;
    for (double p : prod) var += (p - ce.covariance) * (p - ce.covariance);
    ce.std_error = std::sqrt(var / (n * (n - 1.0)));
    out.push_back(ce);
  }
  return out;
}

struct CltReport {
  int inner_size = 0;      // inner window is inner_size x inner_size
  int margin = 0;          // sampling window enlargement
  std::size_t replicas = 0;
  bool degenerate = false;  // sigma^2 = 0 case (constant f), excluded by the theorem
  double sigma2 = 0.0;      // variance of the normalized sum
  // Diagnostics with grand-mean centering (the mu f proxy).
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  // Diagnostics with per-replica-mean centering.
  double ks_statistic_replica_centering = 0.0;
  double ks_p_value_replica_centering = 0.0;
  std::vector<double> standardized;  // grand-mean-centered, standardized
};

// Normality property check of the spatial CLT statistic
// (1/sqrt|V|) sum_{i in V} (tau_i f - centering) over perfect samples of an
// enlarged window. The centering uses the empirical grand mean (exact mu_V f
// is unavailable at this window size); a per-replica-mean variant is reported
// alongside. This is a finite-size property check, not a reproduction of the
// asymptotic theorem.
inline CltReport clt_experiment(const EnergyModel& m, double beta,
                                const std::function<double(const GraphState&, const Vertex&)>& f,
                                int inner_size, int margin, std::size_t replicas,
                                std::uint64_t master_seed, ClanCaps caps = {}) {
  if (replicas < 100)
    throw GuardError("clt_experiment: at least 100 replicas required for a p-value");
  CltReport rep;
  rep.inner_size = inner_size;
  rep.margin = margin;
  rep.replicas = replicas;

  const int lo = 0, hi = inner_size - 1;
  const Window inner = Window::from_box(Box(lo, hi, lo, hi));
  const Window sampling = Window::from_box(Box(lo - margin, hi + margin, lo - margin, hi + margin));
  const double sqrt_n = std::sqrt(static_cast<double>(inner.size()));

  std::vector<double> replica_sum(replicas, 0.0);
  std::vector<double> replica_mean(replicas, 0.0);
  double grand = 0.0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    Engine g = replica_engine(master_seed, r);
    const GraphState x = perfect_sample(m, sampling, beta, g, caps);
    double s = 0.0;
    for (const Vertex& v : inner.vertices()) s += f(x, v);
    replica_sum[r] = s;
    replica_mean[r] = s / static_cast<double>(inner.size());
    grand += s;
  }
  grand /= static_cast<double>(replicas * inner.size());

  std::vector<double> stat(replicas);
  for (std::size_t r = 0; r < replicas; ++r)
    stat[r] = (replica_sum[r] - grand * static_cast<double>(inner.size())) / sqrt_n;

  rep.sigma2 = sample_variance(stat);
  if (rep.sigma2 <= 0.0) {
    rep.degenerate = true;
    return rep;
  }

  const double sd = std::sqrt(rep.sigma2);
  rep.standardized.resize(replicas);
  for (std::size_t r = 0; r < replicas; ++r) rep.standardized[r] = stat[r] / sd;
  const auto ks = ks_test_standard_normal(rep.standardized);
  rep.ks_statistic = ks.statistic;
  rep.ks_p_value = ks.p_value;
  rep.skewness = sample_skewness(rep.standardized);
  rep.excess_kurtosis = sample_excess_kurtosis(rep.standardized);

  // Per-replica centering: each replica centered at its own spatial mean.
  // The statistic then has mean zero by construction within replicas.
  std::vector<double> stat2(replicas);
  const double mean_of_means = sample_mean(replica_mean);
  for (std::size_t r = 0; r < replicas; ++r)
    stat2[r] = (replica_sum[r] - mean_of_means * static_cast<double>(inner.size())) / sqrt_n;
  const double sd2 = std::sqrt(sample_variance(stat2));
  if (sd2 > 0) {
    for (double& v : stat2) v /= sd2;
    const auto ks2 = ks_test_standard_normal(stat2);
    rep.ks_statistic_replica_centering = ks2.statistic;
    rep.ks_p_value_replica_centering = ks2.p_value;
  }
  return rep;
}

// Minimal margin l with the Theorem-3 edge-support bound below `budget` for
// functions of the window edges, embedding window W in W (+) B_l.
inline int embedding_margin(const Window& W, double beta, double M, double budget,
                            int l_max = 200) {
  const double bt = default_beta_tilde(beta, M);
  for (int l = 1; l <= l_max; ++l) {
    BoundQuery q;
    q.beta = beta;
    q.beta_tilde = bt;
    q.M = M;
    q.window = W.dilated(l);
    q.support = W.all_edges();
    q.f_sup_norm = 1.0;
    if (space_convergence_bound(q) < budget) return l;
  }
  throw GuardError("embedding_margin: no margin below budget within l_max");
}

}  // namespace sggraph
