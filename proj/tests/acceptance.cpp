// Acceptance suite: one test per acceptance criterion, each printing a
// CRITERION line. Tolerances are pinned here, in code.

#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sggraph/exact.hpp"
#include "sggraph/experiments.hpp"
#include "sggraph/forward.hpp"
#include "sggraph/perfect.hpp"

using namespace sggraph;

namespace {

void criterion_line(int k, const std::string& name, bool ok, const std::string& detail) {
  std::printf("CRITERION %2d (%s): %s — %s\n", k, name.c_str(), ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

Window lwindow() { return Window::from_vertices({{0, 0}, {1, 0}, {0, 1}}); }

std::vector<double> empirical_window_table(const EnergyModel& m, const Window& W, double beta,
                                           std::size_t n, std::uint64_t seed,
                                           std::optional<Window> domain = std::nullopt) {
  const auto edges = W.all_edges();
  std::vector<double> tab(1ull << edges.size(), 0.0);
  for (std::uint64_t r = 0; r < n; ++r) {
    Engine g = replica_engine(seed, r);
    const auto x = perfect_sample(m, W, beta, g, {}, domain);
    std::size_t mask = 0;
    for (std::size_t b = 0; b < edges.size(); ++b)
      if (x.has(edges[b])) mask |= 1ull << b;
    tab[mask] += 1.0 / static_cast<double>(n);
  }
  return tab;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SGGRAPH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// 1. Oracle equivalence, independent case: EdgeOnly beta=3 on the 2x2 box,
//    per-edge perfect-sample frequency vs e^{-beta L}/(1 + e^{-beta L}),
//    3 binomial sigma at N = 1e5, runtime < 5 min.
TEST(Acceptance, C01_EdgeOnlyOracleEquivalence) {
  const auto t0 = std::chrono::steady_clock::now();
  const double beta = 3.0;
  const std::size_t n = 100000;
  const Window V = Window::from_box(Box(0, 1, 0, 1));
  const auto ens = perfect_ensemble(EnergyModel::edge_only(), V, beta, n, 101);

  bool ok = true;
  double worst = 0.0;
  for (const auto& em : ens.marginals) {
    const double r = std::exp(-beta * edge_length(em.edge));
    const double want = r / (1.0 + r);
    const double dev = std::abs(em.empirical - want) / binomial_sigma(want, n);
    worst = std::max(worst, dev);
    ok = ok && dev <= 3.0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && secs < 300.0;

  std::ostringstream d;
  d << "worst deviation " << worst << " sigma over 6 edges, N=1e5, " << secs << " s";
  criterion_line(1, "edge-only oracle equivalence", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 2. Oracle equivalence, dependent case: Ferrari(0.3, 0.5), M = -0.6,
//    beta = 6 > beta*(-0.6). (a) Draws confined to the 3-vertex oracle
//    window match the exact 8-state table, TV < 0.02 at N = 1e5.
//    (b) The window embedded in a box with margin l chosen so the Theorem-3
//    bound < 0.005: infinite-volume draws vs box-confined draws, TV < 0.02.
TEST(Acceptance, C02_FerrariOracleEquivalence) {
  const EnergyModel m = EnergyModel::ferrari(0.3, 0.5);
  const double beta = 6.0;
  ASSERT_NEAR(m.constant_M(), -0.6, 1e-15);
  const double bs = beta_star(m.constant_M());
  ASSERT_GT(beta, bs);

  const Window W = lwindow();
  const std::size_t n = 100000;
  const auto oracle = exact_distribution(m, W, beta);

  const auto tab_window = empirical_window_table(m, W, beta, n, 202, W);
  const double tv_oracle = total_variation(tab_window, oracle.prob);
  const bool ok_oracle = tv_oracle < 0.02;

  const int l = embedding_margin(W, beta, m.constant_M(), 0.005);
  BoundQuery q;
  q.beta = beta;
  q.beta_tilde = default_beta_tilde(beta, m.constant_M());
  q.M = m.constant_M();
  q.window = W.dilated(l);
  q.support = W.all_edges();
  q.f_sup_norm = 1.0;
  const double budget = space_convergence_bound(q);
  const bool ok_budget = budget < 0.005;

  const auto tab_inf = empirical_window_table(m, W, beta, n, 203);
  const auto tab_box = empirical_window_table(m, W, beta, n, 204, W.dilated(l));
  const double tv_embed = total_variation(tab_inf, tab_box);
  const bool ok_embed = tv_embed < 0.02;

  const bool ok = ok_oracle && ok_budget && ok_embed;
  std::ostringstream d;
  d << "TV(window-confined, oracle) = " << tv_oracle << "; margin l = " << l
    << " with Theorem-3 budget " << budget << "; TV(infinite, box-confined) = " << tv_embed
    << "; N=1e5 each";
  criterion_line(2, "ferrari oracle equivalence + embedding", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 3. Forward/exact agreement: ergodic edge-count averages within 3 batch-means
//    SE of the exact expectation on all oracle windows, all three models,
//    horizon 1e5.
TEST(Acceptance, C03_ForwardMatchesExact) {
  const std::vector<Window> windows = {Window::from_vertices({{0, 0}, {1, 0}}), lwindow(),
                                       Window::from_box(Box(0, 1, 0, 1))};
  const struct {
    EnergyModel m;
    double beta;
  } cases[] = {{EnergyModel::edge_only(), 1.0},
               {EnergyModel::ferrari(0.3, 0.5), 2.0},
               {EnergyModel::two_star(), 1.5}};
  bool ok = true;
  double worst = 0.0;
  std::uint64_t tag = 0;
  for (const auto& cs : cases) {
    for (const auto& V : windows) {
      const auto d = exact_distribution(cs.m, V, cs.beta);
      const double want = exact_expectation(
          d, [](const GraphState& x) { return static_cast<double>(x.edge_count()); });
      const auto est = ergodic_average(
          cs.m, V, cs.beta,
          [](const GraphState& x) { return static_cast<double>(x.edge_count()); }, 1000.0,
          100000.0, derive_seed(303, ++tag));
      const double dev = std::abs(est.mean - want) / est.std_error;
      worst = std::max(worst, dev);
      ok = ok && dev <= 3.0;
    }
  }
  std::ostringstream d;
  d << "worst deviation " << worst << " SE over 9 model/window pairs, horizon 1e5";
  criterion_line(3, "forward/exact agreement", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 4. Detailed balance: residual < 1e-12 on every oracle window, all three
//    models, beta in {0.5, 1, 3, 6}.
TEST(Acceptance, C04_DetailedBalance) {
  const std::vector<Window> windows = {Window::from_vertices({{0, 0}, {1, 0}}), lwindow(),
                                       Window::from_box(Box(0, 1, 0, 1))};
  double worst = 0.0;
  for (const auto& m :
       {EnergyModel::edge_only(), EnergyModel::ferrari(0.3, 0.5), EnergyModel::two_star()})
    for (const auto& V : windows)
      for (double beta : {0.5, 1.0, 3.0, 6.0})
        worst = std::max(worst, detailed_balance_residual(m, V, beta));
  const bool ok = worst < 1e-12;
  std::ostringstream d;
  d << "max residual " << worst << " over 36 cases";
  criterion_line(4, "detailed balance", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 5. Dominance: zero violations of eta <= xi over >= 1e4 coupled events per
//    model.
TEST(Acceptance, C05_PathwiseDominance) {
  const Window V = Window::from_box(Box(0, 1, 0, 1));
  const struct {
    EnergyModel m;
    double beta;
    double horizon;
  } cases[] = {{EnergyModel::edge_only(), 1.0, 10000.0},
               {EnergyModel::ferrari(0.3, 0.5), 6.0, 30000.0},
               {EnergyModel::two_star(), 3.0, 60000.0}};
  bool ok = true;
  std::size_t min_events = SIZE_MAX;
  std::size_t violations = 0;
  for (const auto& cs : cases) {
    GraphState x0(V);
    x0.add(Edge({0, 0}, {0, 1}));
    MultigraphState z0;
    z0.set_count(Edge({0, 0}, {0, 1}), 2);
    z0.set_count(Edge({1, 0}, {1, 1}), 1);
    const auto res = coupled_run(cs.m, V, cs.beta, x0, z0, cs.horizon, 505);
    min_events = std::min(min_events, res.events);
    violations += res.violations;
    ok = ok && res.violations == 0 && res.events >= 10000;
  }
  std::ostringstream d;
  d << violations << " violations, min events per model " << min_events;
  criterion_line(5, "pathwise dominance", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 6. Free-process law: chi-square fit of stationary per-edge counts to
//    Poisson(e^{-beta L - beta M}), p > 0.001, N = 1e5.
TEST(Acceptance, C06_FreeProcessPoisson) {
  const Window V = Window::from_box(Box(0, 1, 0, 1));
  const double beta = 1.0, M = -0.6;
  const auto edges = V.all_edges();
  const std::size_t n = 100000;
  std::vector<std::vector<std::size_t>> hists(edges.size());

  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t seed = derive_seed(606, stream_tag::replica, k);
    // Poisson stationary start, short stretch of dynamics, final counts.
    MultigraphState z0;
    for (const Edge& e : edges) {
      Engine g = make_engine(derive_seed(seed, 0xFEEDULL, pack_coords(e.a.x, e.a.y),
                                         pack_coords(e.b.x, e.b.y)));
      const double lambda = birth_rate(e, beta, M);
      int c = 0;
      double acc = exponential1(g);
      while (acc < lambda) {
        ++c;
        acc += exponential1(g);
      }
      z0.set_count(e, c);
    }
    const auto z = simulate_free(V, beta, M, z0, 2.0, seed);
    for (std::size_t b = 0; b < edges.size(); ++b) {
      const auto c = static_cast<std::size_t>(z.count(edges[b]));
      if (hists[b].size() <= c) hists[b].resize(c + 1, 0);
      ++hists[b][c];
    }
  }

  bool ok = true;
  double min_p = 1.0;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    const auto fit = chi_square_poisson_fit(hists[b], birth_rate(edges[b], beta, M), n);
    min_p = std::min(min_p, fit.p_value);
    ok = ok && fit.p_value > 0.001;
  }
  std::ostringstream d;
  d << "min p-value " << min_p << " over 6 edges, N=1e5";
  criterion_line(6, "free-process Poisson law", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 7. Constants: |alpha(beta*(M)) - 1| < 1e-9 for M in {-0.6, 0, 1};
//    beta*(0) = 2.29243 +- 1e-3 (closed form u^2 - 10u + 1 = 0).
TEST(Acceptance, C07_Constants) {
  bool ok = true;
  double worst = 0.0;
  for (double M : {-0.6, 0.0, 1.0}) {
    const double dev = std::abs(alpha(beta_star(M), M) - 1.0);
    worst = std::max(worst, dev);
    ok = ok && dev < 1e-9;
  }
  const double bs0 = beta_star(0.0);
  const double closed = -std::log(5.0 - std::sqrt(24.0));
  ok = ok && std::abs(bs0 - 2.29243) < 1e-3 && std::abs(bs0 - closed) < 1e-6;
  std::ostringstream d;
  d << "worst |alpha(beta*)-1| = " << worst << ", beta*(0) = " << bs0;
  criterion_line(7, "constants", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 8. Bound domination: empirical P(SD > k), k = 1..5, and P(TL > t) from 1e4
//    clans never exceed the Proposition-1 bounds + 3 sigma, beta_tilde the
//    midpoint of (beta*, beta).
TEST(Acceptance, C08_ClanTailBounds) {
  bool ok = true;
  std::ostringstream d;
  for (const auto& [beta, M] : std::vector<std::pair<double, double>>{{3.0, 0.0}, {6.0, -0.6}}) {
    const auto rep = clan_tail_experiment(beta, M, 10000, 808);
    ok = ok && rep.all_ok;
    double worst_margin = -1e300;
    for (const auto& c : rep.sd) worst_margin = std::max(worst_margin, c.empirical - c.bound);
    for (const auto& c : rep.tl) worst_margin = std::max(worst_margin, c.empirical - c.bound);
    d << "beta=" << beta << " M=" << M << " worst (emp - bound) = " << worst_margin << "; ";
  }
  d << "1e4 clans each";
  criterion_line(8, "SD/TL bound domination", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 9. Edge-marginal and degree bounds: empirical P(edge present) <=
//    e^{-beta L - beta M} + 3 sigma per edge; mean degree <= alpha/2 + 3 sigma.
TEST(Acceptance, C09_MarginalAndDegreeBounds) {
  bool ok = true;
  std::ostringstream d;
  const std::size_t n = 100000;
  const struct {
    EnergyModel m;
    double beta;
    Window V;
  } cases[] = {{EnergyModel::edge_only(), 3.0, Window::from_box(Box(0, 1, 0, 1))},
               {EnergyModel::ferrari(0.3, 0.5), 6.0, lwindow()}};
  for (const auto& cs : cases) {
    const auto ens = perfect_ensemble(cs.m, cs.V, cs.beta, n, 909);
    for (const auto& em : ens.marginals)
      ok = ok && em.empirical <= em.free_bound + 3.0 * binomial_sigma(em.free_bound, n);
    ok = ok && ens.mean_degree <= ens.degree_bound + 3.0 * ens.mean_degree_sigma;
    d << cs.m.name() << ": mean degree " << ens.mean_degree << " <= " << ens.degree_bound
      << "; ";
  }
  d << "N=1e5 each";
  criterion_line(9, "edge-marginal and degree bounds", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 10. CLT property check: EdgeOnly beta=3, f = 1{deg >= 1}, 20x20 inner
//     window, 500 replicas, KS-vs-normal p > 0.01.
TEST(Acceptance, C10_CltPropertyCheck) {
  const auto rep = clt_experiment(
      EnergyModel::edge_only(), 3.0,
      [](const GraphState& x, const Vertex& v) { return x.degree(v) >= 1 ? 1.0 : 0.0; }, 20, 3,
      500, 1010);
  const bool ok = !rep.degenerate && rep.ks_p_value > 0.01;
  std::ostringstream d;
  d << "KS p = " << rep.ks_p_value << ", sigma2 = " << rep.sigma2
    << ", skewness = " << rep.skewness << ", 500 replicas";
  criterion_line(10, "CLT property check", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}

// 11. Determinism: identical config + seed give byte-identical NDJSON and CSV
//     outputs across two runs.
TEST(Acceptance, C11_ByteIdenticalReruns) {
  const std::string out = testing::TempDir() + "acc_det";
  const std::string args = "perfect --model ferrari --h0 0.3 --h1 0.5 --beta 6 --window "
                           "\"0:1,0:1\" --samples 2000 --seed 4242 --format csv --out " +
                           out;
  ASSERT_EQ(run_cli(args), 0);
  const std::string nd1 = slurp(out + ".ndjson");
  const std::string clan1 = slurp(out + ".clan.csv");
  ASSERT_EQ(run_cli(args), 0);
  const std::string nd2 = slurp(out + ".ndjson");
  const std::string clan2 = slurp(out + ".clan.csv");

  const std::string fargs = "forward --model edge --beta 1 --window \"0:1,0:1\" --horizon 500 "
                            "--burn 10 --seed 7 --format csv --out " +
                            out;
  ASSERT_EQ(run_cli(fargs), 0);
  const std::string tr1 = slurp(out + ".trace.csv");
  ASSERT_EQ(run_cli(fargs), 0);
  const std::string tr2 = slurp(out + ".trace.csv");

  const bool ok = !nd1.empty() && nd1 == nd2 && clan1 == clan2 && !tr1.empty() && tr1 == tr2;
  std::ostringstream d;
  d << "NDJSON " << nd1.size() << " bytes, clan CSV " << clan1.size()
    << " bytes, trace CSV " << tr1.size() << " bytes identical across reruns";
  criterion_line(11, "byte-identical reruns", ok, d.str());
  EXPECT_TRUE(ok) << d.str();
}
