#pragma once

#include <nsgas/types.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <span>
#include <vector>

namespace nsgas {

struct MinNormResult {
  double distance = 0.0;  // dist(0, conv S)
  Vector weights;         // convex weights over the input generators
  Vector point;           // sum_i weights_i * S_i
  int major_cycles = 0;
  bool used_fallback = false;
};

namespace detail {

// Affine minimizer of the norm over aff{points[s] : s in support}; weights sum to 1.
inline Vector affine_minimizer(std::span<const Vector> points, const std::vector<std::size_t>& support) {
  const auto s = static_cast<Index>(support.size());
  if (s == 1) return Vector::Ones(1);
  const Vector& base = points[support[0]];
  Matrix diffs(base.size(), s - 1);
  for (Index i = 1; i < s; ++i) diffs.col(i - 1) = points[support[i]] - base;
  const Vector alpha = diffs.completeOrthogonalDecomposition().solve(-base);
  Vector v(s);
  v(0) = 1.0 - alpha.sum();
  v.tail(s - 1) = alpha;
  return v;
}

inline Vector project_to_simplex(const Vector& y) {
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  return (y.array() - theta).max(0.0).matrix();
}

}  // namespace detail

/// Minimum-norm point of conv(points) by Wolfe's active-set method.
///
/// Major cycles add the generator most aligned against the current point;
/// minor cycles move to the affine minimizer of the support, clipping at the
/// simplex boundary. Falls back to projected gradient on the weight simplex
/// if 1000 major cycles do not certify optimality.
inline MinNormResult min_norm_point(std::span<const Vector> points) {
  require(!points.empty(), "min_norm_point: empty generator set");
  const auto m = points.size();
  const Index dim = points[0].size();
  for (const auto& p : points) require(p.size() == dim, "min_norm_point: generators differ in dimension");

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.squaredNorm());
  const double optimality_tol = 1e-14 * std::max(scale, 1e-300);
  constexpr double kWeightTol = 1e-15;
  constexpr int kMaxMajor = 1000;

  MinNormResult out;
  std::size_t start = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (points[j].squaredNorm() < points[start].squaredNorm()) start = j;

  std::vector<std::size_t> support{start};
  std::vector<double> w{1.0};
  Vector x = points[start];

  auto assemble = [&] {
    Vector full = Vector::Zero(static_cast<Index>(m));
    for (std::size_t i = 0; i < support.size(); ++i) full(static_cast<Index>(support[i])) = w[i];
    return full;
  };

  bool converged = false;
  for (int major = 0; major < kMaxMajor; ++major) {
    out.major_cycles = major + 1;
    std::size_t entering = 0;
    double best = x.dot(points[0]);
    for (std::size_t j = 1; j < m; ++j) {
      const double v = x.dot(points[j]);
      if (v < best) {
        best = v;
        entering = j;
      }
    }
    if (x.squaredNorm() - best <= optimality_tol ||
        std::find(support.begin(), support.end(), entering) != support.end()) {
      converged = true;
      break;
    }
    support.push_back(entering);
    w.push_back(0.0);

    for (std::size_t minor = 0; minor <= m + 1; ++minor) {
      const Vector v = detail::affine_minimizer(points, support);
      if ((v.array() > kWeightTol).all()) {
        w.assign(v.data(), v.data() + v.size());
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const double vi = v(static_cast<Index>(i));
        if (vi <= kWeightTol && w[i] - vi > 0.0) theta = std::min(theta, w[i] / (w[i] - vi));
      }
      for (std::size_t i = 0; i < support.size(); ++i) w[i] = (1.0 - theta) * w[i] + theta * v(static_cast<Index>(i));
      std::vector<std::size_t> kept_support;
      std::vector<double> kept_w;
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (w[i] > kWeightTol) {
          kept_support.push_back(support[i]);
          kept_w.push_back(w[i]);
        }
      }
      if (kept_support.empty()) {
        kept_support.push_back(support.back());
        kept_w.push_back(1.0);
      }
      support = std::move(kept_support);
      w = std::move(kept_w);
    }
    double total = 0.0;
    for (double wi : w) total += wi;
    x = Vector::Zero(dim);
    for (std::size_t i = 0; i < support.size(); ++i) {
      w[i] /= total;
      x += w[i] * points[support[i]];
    }
  }

  Vector weights = assemble();
  if (!converged) {
    out.used_fallback = true;
    Matrix gen(dim, static_cast<Index>(m));
    for (std::size_t j = 0; j < m; ++j) gen.col(static_cast<Index>(j)) = points[j];
    const Matrix gram = gen.transpose() * gen;
    const double lipschitz = 2.0 * std::max(gram.diagonal().sum(), 1e-300);
    for (int iter = 0; iter < 100000; ++iter) {
      const Vector grad = 2.0 * gram * weights;
      const Vector next = detail::project_to_simplex(weights - grad / lipschitz);
      if ((next - weights).norm() <= 1e-15) {
        weights = next;
        break;
      }
      weights = next;
    }
    x = gen * weights;
  }
  out.weights = std::move(weights);
  out.point = x;
  out.distance = x.norm();
  return out;
}

}  // namespace nsgas
