#include <nsgas/constructions.hpp>
#include <nsgas/subdiff.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

#include <random>

using namespace nsgas;
using namespace nsgas::testing;

namespace {

// Piecewise formula of the resisting function, written branch by branch.
double resisting_by_branches(const ResistingParams& p, double x1) {
  const auto& b = p.breakpoints;
  const double s = p.sigma;
  if (x1 < b.front() - s / 4) return -x1 + b.front() - s / 2;
  for (std::size_t t = 0; t + 1 < b.size(); ++t) {
    const double mid = 0.5 * (b[t] + b[t + 1]) - s / 4;
    if (x1 >= b[t] - s / 4 && x1 < mid) return x1 - b[t];
    if (x1 >= mid && x1 < b[t + 1] - s / 4) return -x1 + b[t + 1] - s / 2;
  }
  return x1 - b.back();
}

// min over t of the tents max{x1 - b_t, -x1 + b_t - sigma/2}.
double resisting_min_of_tents(const ResistingParams& p, double x1) {
  double v = std::numeric_limits<double>::infinity();
  for (double b : p.breakpoints) v = std::min(v, std::max(x1 - b, -x1 + b - p.sigma / 2));
  return v;
}

// The wedge from its seven-branch table: the value of the region's piece.
double wedge_by_table(double eta, double x, double y) {
  const double p1 = y - eta / 2, p2 = x + eta / 2, p3 = 2 * y + eta, p4 = y / 2 + eta, p5 = -x + 5 * eta / 2,
               p6 = -eta / 2;
  const double first = std::min({p2, p3, p4});
  const double second = std::min(p5, p6);
  return std::max(p1, first + second);
}

}  // namespace

TEST(ResistingParams, SigmaAndEta) {
  const auto p = ResistingParams::from_first_coordinates({0, 0.5, 0.2, 0.5}, 3);
  EXPECT_EQ(p.breakpoints, (std::vector<double>{0, 0.2, 0.5}));
  EXPECT_DOUBLE_EQ(p.sigma, 0.2);
  EXPECT_DOUBLE_EQ(p.eta, 0.00625);
  const auto single = ResistingParams::from_first_coordinates({0.7}, 2);
  EXPECT_EQ(single.sigma, 1.0);
  EXPECT_EQ(single.eta, 1.0 / 32);
  const auto far = ResistingParams::from_first_coordinates({0, 5}, 2);
  EXPECT_EQ(far.sigma, 1.0);
  EXPECT_THROW(ResistingParams::from_first_coordinates({0}, 2, 0.5), std::invalid_argument);
  EXPECT_THROW(ResistingParams::from_first_coordinates({}, 2), std::invalid_argument);
  ResistingParams bad = single;
  bad.sigma = 0.5;
  EXPECT_THROW(build_F(bad), std::invalid_argument);
}

TEST(BuildF, SingleBreakpoint) {
  const auto p = ResistingParams::from_first_coordinates({0}, 2);
  const auto F = build_F(p);
  EXPECT_EQ(F(vec({0, 0})), 0.0);
  EXPECT_EQ(F(vec({0, 7})), 0.0);
  EXPECT_DOUBLE_EQ(F(vec({0.1, -3})), 0.1);
  EXPECT_DOUBLE_EQ(F(vec({-1, 0})), 0.5);
  EXPECT_DOUBLE_EQ(F(vec({-0.25, 0})), -0.25);
  EXPECT_EQ(lipschitz_certificate(F), 1.0);
  EXPECT_LE(F(vec({0, 0})) - infimum(F).value, 1.0);
}

TEST(BuildF, ValuesAtBreakpointsAreZero) {
  const auto p = ResistingParams::from_first_coordinates({0, 0.5, 0.2}, 1);
  const auto F = build_F(p);
  for (double b : {0.0, 0.2, 0.5}) EXPECT_EQ(F(vec({b})), 0.0);
}

TEST(BuildF, MatchesBranchFormulaAndTents) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    // the first query is always the origin, so 0 is always a breakpoint
    std::vector<double> raw{0.0};
    for (int i = 0; i < trial % 6; ++i) raw.push_back(u(rng));
    const auto p = ResistingParams::from_first_coordinates(raw, 1);
    const auto F = build_F(p);
    // every breakpoint and every branch boundary, plus random points
    std::vector<double> probes;
    for (double b : p.breakpoints) probes.insert(probes.end(), {b, b - p.sigma / 4, b + p.sigma / 4});
    for (std::size_t t = 0; t + 1 < p.breakpoints.size(); ++t)
      probes.push_back(0.5 * (p.breakpoints[t] + p.breakpoints[t + 1]) - p.sigma / 4);
    for (int k = 0; k < 200; ++k) probes.push_back(u(rng) * 2);
    for (double x1 : probes) {
      EXPECT_NEAR(F(vec({x1})), resisting_by_branches(p, x1), 1e-12);
      EXPECT_NEAR(F(vec({x1})), resisting_min_of_tents(p, x1), 1e-12);
    }
    EXPECT_EQ(lipschitz_certificate(F), 1.0);
    EXPECT_LE(F(vec({0})) - infimum(F).value, 1.0 + 1e-12);
    EXPECT_NEAR(infimum(F).value, -p.sigma / 4, 1e-12);
  }
}

TEST(BuildWedge, Examples) {
  const double eta = 1.0 / 32;
  const auto h = build_wedge(eta);
  EXPECT_EQ(h(vec({0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(h(vec({0, 2 * eta})), 0.046875);
  EXPECT_THROW(build_wedge(0.0), std::invalid_argument);
}

TEST(BuildWedge, MatchesTable) {
  const double eta = 1.0 / 32;
  const auto h = build_wedge(eta);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-10 * eta, 10 * eta);
  for (int k = 0; k < 10000; ++k) {
    const double x = u(rng), y = u(rng);
    EXPECT_NEAR(h(vec({x, y})), wedge_by_table(eta, x, y), 1e-15);
  }
}

TEST(BuildWedge, ConstantPieceNeverSelectedOnGrid) {
  const double eta = 1.0 / 32;
  const auto h = build_wedge(eta);
  const AffineAtom& constant = h.terms()[1][0];
  ASSERT_TRUE(constant.gradient.isZero(0));
  const int n = 1000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector p = vec({-10 * eta + 20 * eta * i / (n - 1), -10 * eta + 20 * eta * j / (n - 1)});
      // the constant atom is the value only if it is the strict winner
      if (h.term_value(1, p) == constant(p) && h.term_value(1, p) > h.term_value(0, p)) {
        bool strict = true;
        for (std::size_t a = 1; a < h.terms()[1].size(); ++a) strict = strict && h.terms()[1][a](p) > constant(p);
        hits += strict ? 1 : 0;
      }
    }
  EXPECT_EQ(hits, 0);
}

TEST(BuildH, Examples) {
  const auto p = ResistingParams::from_first_coordinates({0}, 3);
  const auto H = build_H(p);
  const auto F = build_F(p);
  EXPECT_EQ(H(vec({0, 0, 0})), 0.0);
  EXPECT_EQ(H(vec({0, -10, 0})), -5.0);
  EXPECT_LE(lipschitz_certificate(H), 3.0);
  EXPECT_LE(H(Vector::Zero(3)) - infimum(H).value, 6.0);
  std::mt19937_64 rng(33);
  for (int k = 0; k < 1000; ++k) {
    Vector y = random_point(rng, 3, 5.0);
    const Vector planar = random_point(rng, 2, p.eta / 8 / std::sqrt(2.0));
    y(0) = planar(0);
    y(1) = planar(1);
    EXPECT_NEAR(H(y), F(y), 1e-12);
  }
  EXPECT_THROW(build_H(ResistingParams::from_first_coordinates({0}, 1)), std::invalid_argument);
}

TEST(BuildH, AgreesWithFNearEveryBreakpoint) {
  const auto p = ResistingParams::from_first_coordinates({-0.4, 0.0, 0.3, 1.7}, 4);
  const auto H = build_H(p);
  const auto F = build_F(p);
  std::mt19937_64 rng(34);
  for (double b : p.breakpoints)
    for (int k = 0; k < 1000; ++k) {
      Vector y = random_point(rng, 4, 3.0);
      const Vector planar = random_point(rng, 2, p.eta / 8 / std::sqrt(2.0));
      y(0) = b + planar(0);
      y(1) = planar(1);
      EXPECT_NEAR(H(y), F(y), 1e-12);
    }
}

TEST(BuildRotation, Examples) {
  const std::vector<Vector> q{vec({0, 0, 0}), vec({0.5, 0, 0})};
  const auto plan = build_rotation(q, 3);
  EXPECT_TRUE(plan.U.isApprox(Matrix::Identity(3, 3), 0.0));
  EXPECT_TRUE(exactly_equal(plan.u2(), vec({0, 1, 0})));
  const std::vector<Vector> single{vec({0, 0})};
  EXPECT_TRUE(exactly_equal(build_rotation(single, 2).u2(), vec({0, 1})));
  const std::vector<Vector> two{vec({0, 0}), vec({1, 0})};
  EXPECT_THROW(build_rotation(two, 2), std::invalid_argument);
}

TEST(BuildRotation, OrthonormalAndOrthogonalToQueries) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Index T = 1 + trial % 8;
    const Index d = T + 1 + trial % 3;
    std::vector<Vector> q{Vector::Zero(d)};
    for (Index t = 1; t < T; ++t) q.push_back(random_point(rng, d, 1.0));
    const auto plan = build_rotation(q, d);
    EXPECT_LE((plan.U.transpose() * plan.U - Matrix::Identity(d, d)).norm(), 1e-10);
    EXPECT_TRUE(exactly_equal(plan.U.col(0), unit_vector(d, 0)));
    for (const auto& x : q) EXPECT_LE(std::abs(plan.u2().dot(x)), 1e-10);
    // deterministic
    EXPECT_TRUE(build_rotation(q, d).U == plan.U);
  }
}

TEST(BuildG, IdentityRotationAndComposition) {
  const auto p = ResistingParams::from_first_coordinates({0.0, 0.5}, 3);
  const auto H = build_H(p);
  RotationPlan identity{Matrix::Identity(3, 2), Matrix::Identity(3, 3)};
  EXPECT_TRUE(build_G(H, identity) == H);

  std::mt19937_64 rng(36);
  const std::vector<Vector> q{vec({0, 0, 0}), vec({0.5, 0.3, -0.2})};
  const auto plan = build_rotation(q, 3);
  const auto G = build_G(H, plan);
  for (int k = 0; k < 200; ++k) {
    const Vector x = random_point(rng, 3, 2.0);
    EXPECT_NEAR(G(x), H(plan.U.transpose() * x), 1e-12);
  }
  // near a recorded query G is the first coordinate shifted by the breakpoint
  for (int k = 0; k < 200; ++k) {
    const Vector y = q[1] + random_point(rng, 3, p.eta / 8 / std::sqrt(3.0));
    EXPECT_NEAR(G(y), y(0) - 0.5, 1e-12);
  }
  for (int k = 0; k < 20; ++k) {
    const Vector x = random_point(rng, 3, 1.0);
    const double dg = certify_gas(G, x, 0, 0.2).distance;
    const double dh = certify_gas(H, plan.U.transpose() * x, 0, 0.2).distance;
    EXPECT_NEAR(dg, dh, 1e-8);
  }
}

TEST(TesterF2, Examples) {
  const auto f2 = build_tester_f2(-0.5, -0.3);
  EXPECT_DOUBLE_EQ(f2(vec({-0.4})), -0.5);
  EXPECT_DOUBLE_EQ(f2(vec({1})), 1.0);
  EXPECT_LE(lipschitz_certificate(f2), 4.0);
  EXPECT_TRUE(certify_gas(f2, vec({0}), 0.0, 1.0).satisfied);
  // equal to x away from [a, b]
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) EXPECT_DOUBLE_EQ(f2(vec({x})), x);
  EXPECT_THROW(build_tester_f2(0.2, 0.1), std::invalid_argument);
}
