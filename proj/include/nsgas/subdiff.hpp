#pragma once

#include <nsgas/min_norm.hpp>
#include <nsgas/pa_core.hpp>
#include <nsgas/types.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace nsgas {

/// Generators of the Goldstein δ-subdifferential conv(∪_{y∈B_δ(x)} ∂f(y)).
/// At delta = 0 this coincides with essentially_active_gradients.
inline GradientPolytope goldstein_generators(const MaxMinFunction& f, const Vector& x, double delta) {
  require(delta >= 0.0, "goldstein_generators: delta must be nonnegative");
  return gradients_near(f, x, delta);
}

inline MinNormResult min_norm_point(const GradientPolytope& polytope) {
  return min_norm_point(std::span<const Vector>(polytope.generators));
}

enum class StationarityKind { gas, nas };

struct StationarityCertificate {
  StationarityKind kind = StationarityKind::gas;
  double epsilon = 0.0;
  double delta = 0.0;
  double distance = 0.0;
  std::vector<Vector> generators;  // the hull whose min-norm point attains `distance`
  Vector weights;
  bool satisfied = false;

  std::string verdict() const {
    const char* prefix = kind == StationarityKind::gas ? "GAS" : "NAS";
    return std::string(prefix) + (satisfied ? "-satisfied" : "-refuted");
  }
};

/// Decides dist(0, ∂_δ f(x)) <= epsilon exactly for the generator hull.
inline StationarityCertificate certify_gas(const MaxMinFunction& f, const Vector& x, double epsilon, double delta) {
  require(epsilon >= 0.0 && delta >= 0.0, "certify_gas: epsilon and delta must be nonnegative");
  StationarityCertificate cert;
  cert.kind = StationarityKind::gas;
  cert.epsilon = epsilon;
  cert.delta = delta;
  auto polytope = goldstein_generators(f, x, delta);
  const auto mn = min_norm_point(polytope);
  cert.distance = mn.distance;
  cert.weights = mn.weights;
  cert.generators = std::move(polytope.generators);
  cert.satisfied = cert.distance <= epsilon;
  return cert;
}

/// dist(0, ∪_{y∈B_δ(x)} ∂f(y)) by enumerating activity patterns: sets of
/// affine pieces whose regions share a point inside the ball.
inline StationarityCertificate certify_nas(const MaxMinFunction& f, const Vector& x, double epsilon, double delta,
                                           std::size_t piece_cap = 32) {
  require(epsilon >= 0.0 && delta >= 0.0, "certify_nas: epsilon and delta must be nonnegative");
  const auto pieces = pieces_near(f, x, delta, PieceScan::all_regions);
  // the cap counts affine pieces; one piece may own several branch regions
  std::set<PieceId> ids;
  for (const auto& p : pieces) ids.insert(p.id);
  if (ids.size() > piece_cap)
    throw IntractableInstance("certify_nas: " + std::to_string(ids.size()) + " affine pieces exceed the cap of " +
                              std::to_string(piece_cap));
  StationarityCertificate cert;
  cert.kind = StationarityKind::nas;
  cert.epsilon = epsilon;
  cert.delta = delta;
  cert.distance = std::numeric_limits<double>::infinity();

  constexpr double kContactSlack = 1e-9;
  auto meets_ball = [&](const Polyhedron& poly) {
    const auto proj = relaxed_distance(poly, x, kContactSlack);
    return proj && proj->distance <= delta + detail::kBallTolerance;
  };

  // regions grouped by affine piece
  std::vector<Vector> gradients;
  std::vector<std::vector<const Polyhedron*>> regions;
  for (const PieceId& id : ids) {
    gradients.push_back(f.atom(id).gradient);
    regions.emplace_back();
    for (const auto& p : pieces)
      if (p.id == id) regions.back().push_back(&p.region);
  }

  auto hull_distance = [&](const std::vector<std::size_t>& chosen, std::size_t from) {
    std::vector<Vector> gens;
    auto add = [&](std::size_t k) {
      if (std::none_of(gens.begin(), gens.end(), [&](const Vector& h) { return exactly_equal(gradients[k], h); }))
        gens.push_back(gradients[k]);
    };
    for (std::size_t k : chosen) add(k);
    for (std::size_t k = from; k < gradients.size(); ++k) add(k);
    return min_norm_point(std::span<const Vector>(gens));
  };

  // Each piece is either left out or taken through one of its regions, as long
  // as the common intersection still meets the ball. Taking more pieces can
  // only shrink the distance, so a branch is cut once even taking every
  // remaining piece could not beat the best pattern found.
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, const Polyhedron&)> search = [&](std::size_t k, const Polyhedron& common) {
    if (cert.distance == 0.0) return;
    if (k == gradients.size()) {
      if (chosen.empty()) return;
      const auto mn = hull_distance(chosen, k);
      if (mn.distance < cert.distance) {
        cert.distance = mn.distance;
        cert.weights = mn.weights;
        cert.generators.clear();
        for (std::size_t i : chosen)
          if (std::none_of(cert.generators.begin(), cert.generators.end(),
                           [&](const Vector& h) { return exactly_equal(gradients[i], h); }))
            cert.generators.push_back(gradients[i]);
      }
      return;
    }
    if (hull_distance(chosen, k).distance >= cert.distance) return;
    for (const Polyhedron* region : regions[k]) {
      Polyhedron joint = common.intersected(*region);
      if (!meets_ball(joint)) continue;
      chosen.push_back(k);
      search(k + 1, joint);
      chosen.pop_back();
    }
    search(k + 1, common);
  };
  search(0, Polyhedron(f.dimension()));
  cert.satisfied = cert.distance <= epsilon;
  return cert;
}

namespace detail {

inline Vector uniform_in_ball(std::mt19937_64& rng, const Vector& center, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index d = center.size();
  Vector dir(d);
  double norm = 0.0;
  do {
    for (Index i = 0; i < d; ++i) dir(i) = normal(rng);
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
  return center + (r / norm) * dir;
}

}  // namespace detail

/// Min-norm point of the hull of gradients observed at n uniform samples of
/// B_δ(x) (gradient sampling). An upper bound on the exact Goldstein distance.
inline double sampled_goldstein_distance(const MaxMinFunction& f, const Vector& x, double delta, std::size_t n,
                                         std::uint64_t seed) {
  require(n >= 1, "sampled_goldstein_distance: need at least one sample");
  require(x.size() == f.dimension(), "sampled_goldstein_distance: dimension mismatch");
  std::mt19937_64 rng(seed);
  std::vector<Vector> gradients;
  auto record = [&](const Vector& g) {
    if (std::none_of(gradients.begin(), gradients.end(), [&](const Vector& h) { return exactly_equal(g, h); }))
      gradients.push_back(g);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (auto g = gradient_at(f, detail::uniform_in_ball(rng, x, delta))) record(*g);
  }
  if (gradients.empty()) {
    if (auto g = gradient_at(f, x)) record(*g);
  }
  require(!gradients.empty(), "sampled_goldstein_distance: no differentiable sample");
  return min_norm_point(std::span<const Vector>(gradients)).distance;
}

struct SegmentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of E_z[f'(z; x - y)] for z uniform on [x, y], an
/// unbiased estimator of f(x) - f(y).
inline SegmentEstimate segment_gap_estimate(const MaxMinFunction& f, const Vector& x, const Vector& y, std::size_t n,
                                            std::uint64_t seed) {
  require(n >= 1, "segment_gap_estimate: need at least one sample");
  require(x.size() == f.dimension() && y.size() == f.dimension(), "segment_gap_estimate: dimension mismatch");
  require(!exactly_equal(x, y), "segment_gap_estimate: endpoints must differ");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector direction = x - y;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector z = y + unit(rng) * direction;
    const double v = directional_derivative(f, z, direction);
    sum += v;
    sum_sq += v * v;
  }
  SegmentEstimate out;
  out.samples = n;
  out.mean = sum / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * out.mean * out.mean) / static_cast<double>(n - 1));
    out.standard_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

}  // namespace nsgas
