#include <nsgas/constructions.hpp>
#include <nsgas/subdiff.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

#include <random>

using namespace nsgas;
using namespace nsgas::testing;

namespace {

MaxMinFunction default_H(Index d = 2) { return build_H(ResistingParams::from_first_coordinates({0.0}, d)); }

}  // namespace

TEST(GoldsteinGenerators, AbsoluteValue) {
  EXPECT_EQ(sorted_scalars(goldstein_generators(abs_1d(), vec({0.3}), 0.5)), (std::vector<double>{-1, 1}));
  EXPECT_EQ(sorted_scalars(goldstein_generators(abs_1d(), vec({0.3}), 0.1)), (std::vector<double>{1}));
  EXPECT_THROW(goldstein_generators(abs_1d(), vec({0.3}), -0.1), std::invalid_argument);
}

TEST(GoldsteinGenerators, HardFunctionAtOrigin) {
  const auto cert = certify_gas(default_H(), vec({0, 0}), 0.2, 0.2);
  EXPECT_FALSE(cert.satisfied);
  EXPECT_GE(cert.distance, kHardnessBound - 1e-8);
  EXPECT_EQ(cert.verdict(), "GAS-refuted");
}

TEST(CertifyGas, AbsoluteValueExamples) {
  const auto a = certify_gas(abs_1d(), vec({0.3}), 0.0, 0.5);
  EXPECT_EQ(a.distance, 0.0);
  EXPECT_TRUE(a.satisfied);
  const auto b = certify_gas(abs_1d(), vec({0.3}), 0.1, 0.1);
  EXPECT_EQ(b.distance, 1.0);
  EXPECT_FALSE(b.satisfied);
}

TEST(CertifyGas, WitnessWeights) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_function(rng, 1 + trial % 3, 8);
    const auto cert = certify_gas(f, random_point(rng, f.dimension(), 1.0), 0.1, 0.3);
    ASSERT_EQ(static_cast<std::size_t>(cert.weights.size()), cert.generators.size());
    EXPECT_NEAR(cert.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(cert.weights.minCoeff(), 0.0);
    Vector p = Vector::Zero(f.dimension());
    for (std::size_t i = 0; i < cert.generators.size(); ++i) p += cert.weights(static_cast<Index>(i)) * cert.generators[i];
    EXPECT_NEAR(p.norm(), cert.distance, 1e-8);
    EXPECT_EQ(cert.satisfied, cert.distance <= 0.1);
  }
}

TEST(CertifyNas, AbsoluteValueExamples) {
  EXPECT_TRUE(certify_nas(abs_1d(), vec({0.3}), 0.0, 0.5).satisfied);
  const auto refuted = certify_nas(abs_1d(), vec({0.3}), 0.5, 0.1);
  EXPECT_EQ(refuted.distance, 1.0);
  EXPECT_FALSE(refuted.satisfied);
  EXPECT_TRUE(certify_nas(abs_1d(), vec({0.05}), 0.0, 0.1).satisfied);
  EXPECT_TRUE(certify_gas(abs_1d(), vec({0.05}), 0.0, 0.1).satisfied);
}

TEST(CertifyNas, PieceCapRaisesIntractable) {
  std::vector<MinTerm> terms;
  for (int i = 0; i < 40; ++i) {
    const double angle = 2 * M_PI * i / 40;
    terms.push_back({{vec({std::cos(angle), std::sin(angle)}), 0.0}});
  }
  const MaxMinFunction cone(2, terms);
  EXPECT_THROW(certify_nas(cone, vec({0, 0}), 0.1, 0.5), IntractableInstance);
  EXPECT_NO_THROW(certify_nas(cone, vec({0, 0}), 0.1, 0.5, 64));
}

TEST(CertifyNas, ImpliesGasOnRandomInstances) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_function(rng, 1 + trial % 3, 8);
    const Vector x = random_point(rng, f.dimension(), 1.0);
    const double eps = 0.5 * u(rng), delta = 0.5 * u(rng);
    const auto nas = certify_nas(f, x, eps, delta);
    const auto gas = certify_gas(f, x, eps, delta);
    EXPECT_GE(nas.distance, gas.distance - 1e-10);
    if (nas.satisfied) {
      EXPECT_TRUE(gas.satisfied);
    }
  }
}

TEST(CertifyNas, BoundedByPointwiseClarkeDistances) {
  // any y in the ball gives dist(0, ∂f(y)) >= the NAS distance; kinks are hit
  // by projecting random points onto atom-equality hyperplanes
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 1 + trial % 2;
    const auto f = random_function(rng, d, 6);
    const Vector x = random_point(rng, d, 1.0);
    const double delta = 0.5 * u(rng);
    const auto nas = certify_nas(f, x, 0.0, delta);
    std::vector<AffineAtom> atoms;
    for (const auto& term : f.terms()) atoms.insert(atoms.end(), term.begin(), term.end());
    double sampled = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 400; ++k) {
      Vector y = detail::uniform_in_ball(rng, x, delta);
      const auto& a = atoms[rng() % atoms.size()];
      const auto& b = atoms[rng() % atoms.size()];
      const Vector n = a.gradient - b.gradient;
      if (k % 2 == 0 && n.norm() > 1e-6) {
        const Vector z = y - ((a(y) - b(y)) / n.squaredNorm()) * n;
        if ((z - x).norm() <= delta) y = z;
      }
      sampled = std::min(sampled, min_norm_point(essentially_active_gradients(f, y)).distance);
    }
    EXPECT_LE(nas.distance, sampled + 1e-9) << "trial " << trial;
  }
}

TEST(Goldstein, MonotoneInDelta) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_function(rng, 1 + trial % 3, 8);
    const Vector x = random_point(rng, f.dimension(), 1.0);
    const double d1 = 0.5 * u(rng), d2 = d1 + 0.5 * u(rng);
    EXPECT_GE(certify_gas(f, x, 0, d1).distance, certify_gas(f, x, 0, d2).distance - 1e-8);
  }
}

TEST(Goldstein, ZeroRadiusIsClarke) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_function(rng, 2, 8);
    const Vector x = random_point(rng, 2, 1.0);
    const auto clarke = essentially_active_gradients(f, x);
    EXPECT_NEAR(certify_gas(f, x, 0, 0).distance, min_norm_point(clarke).distance, 1e-12);
  }
}

TEST(Goldstein, PlateauIsStationary) {
  const auto H = default_H();
  const auto cert = certify_gas(H, vec({0, -20}), 0.0, 0.5);
  EXPECT_EQ(cert.distance, 0.0);
  EXPECT_TRUE(cert.satisfied);
}

TEST(SampledGoldstein, AbsoluteValueExamples) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double v = sampled_goldstein_distance(abs_1d(), vec({0}), 1.0, 1000, seed);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 0.2);
    EXPECT_EQ(sampled_goldstein_distance(abs_1d(), vec({5}), 1.0, 1 + seed, seed), 1.0);
  }
}

TEST(SampledGoldstein, HardFunctionBracketsExact) {
  const auto H = default_H();
  const double exact = certify_gas(H, vec({0, 0}), 0, 0.2).distance;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double v = sampled_goldstein_distance(H, vec({0, 0}), 0.2, 10000, seed);
    EXPECT_GE(v, exact - 1e-12);
    EXPECT_LE(v, exact + 0.05);
  }
}

TEST(SegmentGap, Examples) {
  const auto a = segment_gap_estimate(abs_1d(), vec({2}), vec({1}), 100, 1);
  EXPECT_EQ(a.mean, 1.0);
  const auto b = segment_gap_estimate(abs_1d(), vec({1}), vec({-1}), 10000, 2);
  EXPECT_NEAR(b.mean, 0.0, 0.05);
  EXPECT_LE(std::abs(b.mean), 3 * b.standard_error);
  const auto F = build_F(ResistingParams::from_first_coordinates({0.0}, 2));
  const Vector x = vec({0.6, 0}), y = vec({0, 0});
  const auto c = segment_gap_estimate(F, x, y, 10000, 3);
  EXPECT_LE(std::abs(c.mean - (F(x) - F(y))), 3 * c.standard_error + 1e-12);
  EXPECT_THROW(segment_gap_estimate(F, x, x, 10, 0), std::invalid_argument);
}
