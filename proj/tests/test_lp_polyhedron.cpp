#include <nsgas/lp.hpp>
#include <nsgas/polyhedron.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace nsgas;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Polyhedron halfspaces(std::initializer_list<std::pair<Vector, double>> rows) {
  Polyhedron p(rows.begin()->first.size());
  for (const auto& [n, b] : rows) p.add_halfspace(n, b);
  return p;
}

}  // namespace

TEST(Lp, BoxMinimum) {
  Matrix a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b = vec({1, 2, 3, 4});
  const auto r = minimize_linear(vec({1, 1}), a, b);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.value, -6.0, 1e-12);
  EXPECT_NEAR(r.solution(0), -2.0, 1e-12);
  EXPECT_NEAR(r.solution(1), -4.0, 1e-12);
}

TEST(Lp, InfeasibleAndUnbounded) {
  Matrix a(2, 1);
  a << 1, -1;
  EXPECT_EQ(minimize_linear(vec({0}), a, vec({-1, -1})).status, LpStatus::infeasible);
  Matrix half(1, 1);
  half << 1;
  EXPECT_EQ(minimize_linear(vec({1}), half, vec({0})).status, LpStatus::unbounded);
  EXPECT_EQ(minimize_linear(vec({-1}), half, vec({0})).status, LpStatus::optimal);
}

TEST(Lp, AgreesWithVertexEnumerationOnRandom2D) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    // bounded by a box plus random cuts through a region containing the origin
    Matrix a(8, 2);
    Vector b(8);
    a.topRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
    b.head(4).setConstant(2.0);
    for (int i = 4; i < 8; ++i) {
      a.row(i) << u(rng), u(rng);
      b(i) = 0.5 + std::abs(u(rng));
    }
    const Vector c = vec({u(rng), u(rng)});
    const auto r = minimize_linear(c, a, b);
    ASSERT_EQ(r.status, LpStatus::optimal);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) {
        Eigen::Matrix2d m;
        m << a.row(i), a.row(j);
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Eigen::Vector2d v = m.partialPivLu().solve(Eigen::Vector2d(b(i), b(j)));
        if (((a * v - b).array() <= 1e-9).all()) best = std::min(best, c.dot(v));
      }
    EXPECT_NEAR(r.value, best, 1e-9);
  }
}

TEST(Polyhedron, RegionDistanceExamples) {
  {
    auto p = halfspaces({{vec({1}), 0.0}});
    const auto r = region_distance(p, vec({2}));
    EXPECT_NEAR(r.distance, 2.0, 1e-10);
    EXPECT_NEAR(r.point(0), 0.0, 1e-10);
  }
  {
    auto p = halfspaces({{vec({-1, 0}), -1.0}, {vec({0, -1}), -1.0}});
    const auto r = region_distance(p, vec({0, 0}));
    EXPECT_NEAR(r.distance, std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.point(0), 1.0, 1e-10);
    EXPECT_NEAR(r.point(1), 1.0, 1e-10);
  }
  {
    auto p = halfspaces({{vec({1, 1}), -1.0}});
    const auto r = region_distance(p, vec({0, 0}));
    EXPECT_NEAR(r.distance, 1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.point(0), -0.5, 1e-10);
    EXPECT_NEAR(r.point(1), -0.5, 1e-10);
  }
}

TEST(Polyhedron, EmptyRegionIsAnError) {
  auto p = halfspaces({{vec({1}), -1.0}, {vec({-1}), -1.0}});
  EXPECT_FALSE(is_nonempty(p));
  EXPECT_FALSE(is_full_dimensional(p));
  EXPECT_THROW(region_distance(p, vec({0})), std::invalid_argument);
}

TEST(Polyhedron, FullDimensionalImpliesNonempty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 300; ++trial) {
    Polyhedron p(3);
    for (int i = 0; i < 5; ++i) p.add_halfspace(vec({u(rng), u(rng), u(rng)}), 0.3 * u(rng));
    if (is_full_dimensional(p)) {
      EXPECT_TRUE(is_nonempty(p));
    }
  }
}

TEST(Polyhedron, LowerDimensionalSetIsNotFullDimensional) {
  auto p = halfspaces({{vec({1, 0}), 0.0}, {vec({-1, 0}), 0.0}});
  EXPECT_TRUE(is_nonempty(p));
  EXPECT_FALSE(is_full_dimensional(p));
  const auto r = region_distance(p, vec({3, 4}));
  EXPECT_NEAR(r.distance, 3.0, 1e-10);
}

TEST(Polyhedron, ProjectionMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Polyhedron p(2);
    for (int i = 0; i < 4; ++i) p.add_halfspace(vec({u(rng), u(rng)}), 0.5 * u(rng));
    if (!is_nonempty(p)) continue;
    const Vector x = vec({2 * u(rng), 2 * u(rng)});
    const auto r = region_distance(p, x);
    EXPECT_TRUE(p.contains(r.point, 1e-8));
    // the projection is a local minimizer: nearby feasible points are not closer
    for (int k = 0; k < 200; ++k) {
      const Vector y = r.point + 0.05 * vec({u(rng), u(rng)});
      if (p.contains(y, 0.0)) {
        EXPECT_GE((y - x).norm(), r.distance - 1e-9);
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Polyhedron, InscribedRadiusOfBox) {
  auto p = halfspaces({{vec({1, 0}), 1.0}, {vec({-1, 0}), 1.0}, {vec({0, 1}), 0.25}, {vec({0, -1}), 0.25}});
  EXPECT_NEAR(*inscribed_radius(p), 0.25, 1e-12);
}

TEST(Polyhedron, CylinderInHighDimension) {
  // constraints only on two coordinates of a 65-dimensional space
  Polyhedron p(65);
  Vector n = Vector::Zero(65);
  n(0) = 1;
  p.add_halfspace(n, -1.0);
  n.setZero();
  n(1) = 1;
  p.add_halfspace(n, -1.0);
  const auto r = region_distance(p, Vector::Zero(65));
  EXPECT_NEAR(r.distance, std::sqrt(2.0), 1e-10);
  EXPECT_TRUE(is_full_dimensional(p));
}
