#include <gtest/gtest.h>

#include <cmath>

#include "sggraph/analysis.hpp"

using namespace sggraph;

TEST(Analysis, AlphaClosedForm) {
  // beta = ln 2, M = 0: 8*(1/2)/(1/2)^2 = 16.
  EXPECT_NEAR(alpha(std::log(2.0), 0.0), 16.0, 1e-12);
  EXPECT_NEAR(alpha(3.0, 0.0), 0.4411280, 5e-8);
  EXPECT_NEAR(alpha(6.0, -0.6), 8.0 * std::exp(-2.4) / std::pow(1.0 - std::exp(-6.0), 2), 1e-15);
  EXPECT_NEAR(alpha(6.0, -0.6), 0.7293549, 5e-8);
  EXPECT_THROW(alpha(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(alpha(-1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(alpha(1.0, -1.0), std::invalid_argument);
}

TEST(Analysis, AlphaStrictlyDecreasing) {
  for (double M : {-0.6, 0.0, 1.0}) {
    double prev = alpha(0.05, M);
    for (double beta = 0.1; beta < 12.0; beta += 0.05) {
      const double a = alpha(beta, M);
      ASSERT_LT(a, prev) << "beta=" << beta << " M=" << M;
      prev = a;
    }
  }
}

TEST(Analysis, BetaStarClosedFormM0) {
  // alpha(beta)=1 at M=0 reduces to u^2 - 10u + 1 = 0 with u = e^{-beta}.
  const double u = 5.0 - std::sqrt(24.0);
  const double closed = -std::log(u);
  EXPECT_NEAR(closed, 2.2924316695611777, 1e-12);
  EXPECT_NEAR(beta_star(0.0), closed, 1e-6);
  EXPECT_NEAR(beta_star(0.0, 1e-12), closed, 1e-9);
}

TEST(Analysis, BetaStarDefiningProperty) {
  for (double M : {-0.6, 0.0, 1.0})
    EXPECT_NEAR(alpha(beta_star(M), M), 1.0, 1e-9) << "M=" << M;
  for (double M = -0.9; M <= 2.0; M += 0.1)
    EXPECT_NEAR(alpha(beta_star(M), M), 1.0, 1e-9) << "M=" << M;
}

TEST(Analysis, BetaStarFerrariRange) {
  const double bs = beta_star(-0.6);
  EXPECT_GT(bs, 5.0);
  EXPECT_LT(bs, 6.0);
}

TEST(Analysis, SpaceBoundVertexForm) {
  // f supported on the center of the L1 ball B_l: d({center}, complement) = l + 1.
  const int l = 5;
  BoundQuery q;
  q.beta = 4.0;
  q.beta_tilde = 3.0;
  q.M = 0.0;
  q.window = Window::from_vertices({{0, 0}}).dilated(l);
  q.support = std::vector<Vertex>{{0, 0}};
  q.f_sup_norm = 1.0;
  const double a = alpha(3.0, 0.0);
  const double want = a / (1.0 - a) * std::exp(-1.0 * (l + 1));
  EXPECT_NEAR(space_convergence_bound(q), want, 1e-12);

  q.f_sup_norm = 0.0;
  EXPECT_NEAR(space_convergence_bound(q), 0.0, 1e-15);
}

TEST(Analysis, SpaceBoundRestrictedDegreeClosedForm) {
  // Restricted-degree specialization: f = degree of the center restricted to
  // B_k, window B_l. The edge-form sum has the closed form
  //   sum_{s=1..k} 4s e^{-bt s} e^{-(b-bt)(l+1-s)}
  //     = (alpha(g)/2) e^{M g} [k e^{-g(k+1)} - (k+1) e^{-g k} + 1] e^{-(b-bt)(l+1)}
  // with g = 2*bt - b, and ||f|| = 2k(k+1).
  const int k = 2, l = 5;
  const double beta = 4.0, bt = 3.0, M = 0.0;
  const Vertex center{0, 0};

  BoundQuery q;
  q.beta = beta;
  q.beta_tilde = bt;
  q.M = M;
  q.window = Window::from_vertices({center}).dilated(l);
  std::vector<Edge> supp;
  for (int s = 1; s <= k; ++s)
    for (const Vertex& j : shell(center, s)) supp.push_back(Edge(center, j));
  q.support = supp;
  q.f_sup_norm = 2.0 * k * (k + 1);

  const double g = 2.0 * bt - beta;
  const double bracket = k * std::exp(-g * (k + 1)) - (k + 1) * std::exp(-g * k) + 1.0;
  const double closed = (2.0 * q.f_sup_norm / (1.0 - alpha(bt, M))) * (alpha(g, M) / 2.0) *
                        std::exp(M * g) * bracket * std::exp(-(beta - bt) * (l + 1));
  EXPECT_NEAR(space_convergence_bound(q), closed, 1e-9);
}

TEST(Analysis, MixingBoundDecaysWithDistance) {
  auto make_q = [&](Vertex v) {
    BoundQuery q;
    q.beta = 4.0;
    q.beta_tilde = 3.0;
    q.M = 0.0;
    q.window = Window::from_box(Box(-50, 50, -50, 50));
    q.support = std::vector<Vertex>{v};
    q.f_sup_norm = 1.0;
    return q;
  };
  double prev = 1e300;
  for (int n : {4, 8, 16, 32}) {
    const double b = mixing_bound(make_q({0, 0}), make_q({n, 0}));
    const double a = alpha(3.0, 0.0);
    const double want = 0.5 * std::pow(a / (1 - a), 2) * n * std::exp(-1.0 * n);
    EXPECT_NEAR(b, want, 1e-12);
    EXPECT_LT(b, prev);
    prev = b;
  }

  auto qg = make_q({3, 0});
  qg.f_sup_norm = 0.0;
  EXPECT_NEAR(mixing_bound(make_q({0, 0}), qg), 0.0, 1e-15);
}

TEST(Analysis, MixingBoundEdgeForm) {
  const double beta = 4.0, bt = 3.0, M = 0.0;
  BoundQuery qf;
  qf.beta = beta;
  qf.beta_tilde = bt;
  qf.M = M;
  qf.window = Window::from_box(Box(-10, 10, -10, 10));
  qf.support = std::vector<Edge>{Edge({0, 0}, {1, 0})};
  qf.f_sup_norm = 1.0;
  BoundQuery qg = qf;
  qg.support = std::vector<Edge>{Edge({5, 0}, {6, 0})};

  // d({(0,0),(1,0)}, {(5,0),(6,0)}) = 4, lengths 1 and 1.
  const double a = alpha(bt, M);
  const double want =
      2.0 / ((1 - a) * (1 - a)) * 4.0 * std::exp(-bt * 2.0) * std::exp(-(beta - bt) * 4.0);
  EXPECT_NEAR(mixing_bound(qf, qg), want, 1e-12);
}

TEST(Analysis, SdTailBound) {
  const double beta = 4.0, bt = 3.0, M = 0.0;
  const double a = alpha(bt, M);
  EXPECT_NEAR(sd_tail_bound(ClanRootKind::VertexRoot, 3, beta, bt, M),
              0.5 * a / (1 - a) * std::exp(-3.0), 1e-12);
  EXPECT_NEAR(sd_tail_bound(ClanRootKind::EdgeRoot, 3, beta, bt, M, 2),
              std::exp(-bt * 2.0) / (1 - a) * std::exp(-3.0), 1e-12);
  // k -> infinity: bound -> 0.
  EXPECT_LT(sd_tail_bound(ClanRootKind::VertexRoot, 200, beta, bt, M), 1e-80);
}

TEST(Analysis, TlTailBound) {
  const double beta = 4.0, M = 0.0;
  EXPECT_NEAR(tl_tail_bound(1, 1.0, 5.0, beta, M),
              std::exp(-4.0) * std::exp(-(1.0 - alpha(beta, M)) * 5.0), 1e-12);
  EXPECT_LT(tl_tail_bound(1, 1.0, 1e4, beta, M), 1e-300);
  EXPECT_THROW(tl_tail_bound(1, 1.0, 5.0, 1.0, 0.0), GuardError);
}

TEST(Analysis, ExpectedDegreeBound) {
  EXPECT_NEAR(expected_degree_bound(3.0, 0.0), 0.2205640, 5e-8);
  // Monotone decreasing in M.
  double prev = 1e300;
  for (double M : {-0.5, 0.0, 0.5, 1.0}) {
    const double b = expected_degree_bound(3.0, M);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Analysis, BoundEvaluatorsMonotoneInDistance) {
  for (int l : {2, 4, 8}) {
    BoundQuery q1, q2;
    for (auto* q : {&q1, &q2}) {
      q->beta = 5.0;
      q->beta_tilde = 3.5;
      q->M = 0.0;
      q->f_sup_norm = 1.0;
      q->support = std::vector<Vertex>{{0, 0}};
    }
    q1.window = Window::from_box(Box(-l, l, -l, l));
    q2.window = Window::from_box(Box(-2 * l, 2 * l, -2 * l, 2 * l));
    EXPECT_GT(space_convergence_bound(q1), space_convergence_bound(q2));
  }
}

TEST(Analysis, GuardErrors) {
  BoundQuery q;
  q.beta = 2.0;
  q.beta_tilde = 1.0;  // alpha(1, 0) > 1
  q.M = 0.0;
  q.window = Window::from_box(Box(-2, 2, -2, 2));
  q.support = std::vector<Vertex>{{0, 0}};
  q.f_sup_norm = 1.0;
  EXPECT_THROW(space_convergence_bound(q), GuardError);
  EXPECT_THROW(default_beta_tilde(1.0, 0.0), GuardError);
  EXPECT_NEAR(default_beta_tilde(4.0, 0.0), 0.5 * (beta_star(0.0) + 4.0), 1e-6);
}
