#pragma once

#include <nsgas/pa_core.hpp>
#include <nsgas/types.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace nsgas {

/// Breakpoints of the single-coordinate resisting function and the scales
/// derived from them.
struct ResistingParams {
  std::vector<double> breakpoints;  // strictly increasing
  double sigma = 1.0;
  double eta = 1.0 / 32.0;
  Index dimension = 2;

  /// Sorts and collapses exactly repeated values, then sets sigma to the
  /// smallest gap between distinct breakpoints capped at 1, and eta to
  /// sigma/32 unless given.
  static ResistingParams from_first_coordinates(std::vector<double> raw, Index dimension,
                                                std::optional<double> eta = std::nullopt) {
    require(!raw.empty(), "ResistingParams: at least one breakpoint required");
    for (double v : raw) require(std::isfinite(v), "ResistingParams: non-finite breakpoint");
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    ResistingParams p;
    p.breakpoints = std::move(raw);
    p.dimension = dimension;
    p.sigma = 1.0;
    for (std::size_t i = 1; i < p.breakpoints.size(); ++i)
      p.sigma = std::min(p.sigma, p.breakpoints[i] - p.breakpoints[i - 1]);
    p.eta = eta.value_or(p.sigma / 32.0);
    p.validate();
    return p;
  }

  void validate() const {
    require(!breakpoints.empty(), "ResistingParams: at least one breakpoint required");
    require(dimension >= 1, "ResistingParams: dimension must be positive");
    double gap = 1.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      require(breakpoints[i] > breakpoints[i - 1], "ResistingParams: breakpoints must be strictly increasing");
      gap = std::min(gap, breakpoints[i] - breakpoints[i - 1]);
    }
    require(sigma == gap, "ResistingParams: sigma must equal min(smallest breakpoint gap, 1)");
    require(eta > 0.0 && eta <= sigma / 32.0, "ResistingParams: eta must lie in (0, sigma/32]");
  }
};

namespace detail {

inline AffineAtom first_coordinate_atom(Index d, double slope, double offset) {
  return {slope * unit_vector(d, 0), offset};
}

inline AffineAtom planar_atom(Index d, double g1, double g2, double offset) {
  Vector g = Vector::Zero(d);
  g(0) = g1;
  g(1) = g2;
  return {std::move(g), offset};
}

// The six atoms of min{x+η/2, 2y+η, y/2+η} + min{-x+5η/2, -η/2} after
// expanding the sum, in local coordinates (x - shift, y). Offsets are taken
// from the expanded table rather than summed, so the x-atom keeps offset
// exactly -shift.
inline MinTerm wedge_atoms(Index d, double eta, double shift) {
  return {
      planar_atom(d, 0.0, 0.0, 3.0 * eta),                    // ②+⑤
      planar_atom(d, 1.0, 0.0, -shift),                       // ②+⑥
      planar_atom(d, -1.0, 2.0, 3.5 * eta + shift),           // ③+⑤
      planar_atom(d, 0.0, 2.0, 0.5 * eta),                    // ③+⑥
      planar_atom(d, -1.0, 0.5, 3.5 * eta + shift),           // ④+⑤
      planar_atom(d, 0.0, 0.5, 0.5 * eta),                    // ④+⑥
  };
}

inline AffineAtom wedge_floor_atom(Index d, double eta) { return planar_atom(d, 0.0, 1.0, -0.5 * eta); }

}  // namespace detail

/// The resisting function of the first coordinate: the minimum over t of the
/// tents max{x1 - b_t, -x1 + b_t - sigma/2}.
///
/// Stored in max-min form as max{L_1, R_T, min{R_t, L_{t+1}} for t < T} with
/// R_t = x1 - b_t and L_t = -x1 + b_t - sigma/2, which needs T + 1 terms
/// instead of the 2^T of a direct distribution.
inline MaxMinFunction build_F(const ResistingParams& params) {
  params.validate();
  const Index d = params.dimension;
  const auto& b = params.breakpoints;
  const double half_sigma = 0.5 * params.sigma;
  auto rising = [&](std::size_t t) { return detail::first_coordinate_atom(d, 1.0, -b[t]); };
  auto falling = [&](std::size_t t) { return detail::first_coordinate_atom(d, -1.0, b[t] - half_sigma); };
  std::vector<MinTerm> terms;
  terms.push_back({falling(0)});
  terms.push_back({rising(b.size() - 1)});
  for (std::size_t t = 0; t + 1 < b.size(); ++t) terms.push_back({rising(t), falling(t + 1)});
  return MaxMinFunction(d, std::move(terms));
}

/// The two-dimensional wedge h(x, y) = max{y - η/2, h~(x, y)}.
inline MaxMinFunction build_wedge(double eta) {
  require(eta > 0.0, "build_wedge: eta must be positive");
  return MaxMinFunction(2, {{detail::wedge_floor_atom(2, eta)}, detail::wedge_atoms(2, eta, 0.0)});
}

/// max{x2 - η/2, max_t h~(x1 - b_t, x2)}, without the -5 floor.
inline MaxMinFunction build_H_tilde(const ResistingParams& params) {
  params.validate();
  const Index d = params.dimension;
  require(d >= 2, "build_H: dimension must be at least 2");
  std::vector<MinTerm> terms;
  terms.push_back({detail::wedge_floor_atom(d, params.eta)});
  for (double b : params.breakpoints) terms.push_back(detail::wedge_atoms(d, params.eta, b));
  return MaxMinFunction(d, std::move(terms));
}

inline constexpr double kPlateauLevel = -5.0;

/// H = max{-5, H~}.
inline MaxMinFunction build_H(const ResistingParams& params) {
  params.validate();
  const Index d = params.dimension;
  require(d >= 2, "build_H: dimension must be at least 2");
  std::vector<MinTerm> terms;
  terms.push_back({AffineAtom{Vector::Zero(d), kPlateauLevel}});
  terms.push_back({detail::wedge_floor_atom(d, params.eta)});
  for (double b : params.breakpoints) terms.push_back(detail::wedge_atoms(d, params.eta, b));
  return MaxMinFunction(d, std::move(terms));
}

/// Orthonormal U = [e1, u2, U~] with u2 orthogonal to e1 and to every query.
struct RotationPlan {
  Matrix V;
  Matrix U;

  Vector u2() const { return U.col(1); }
};

namespace detail {

// Residual of v after two rounds of Gram-Schmidt against the columns of basis.
inline Vector orthogonal_residual(const std::vector<Vector>& basis, Vector v) {
  for (int round = 0; round < 2; ++round)
    for (const auto& q : basis) v -= q.dot(v) * q;
  return v;
}

}  // namespace detail

/// Builds U from the recorded queries. V = [e1, q_2, ..., q_T]; u2 is the
/// first standard basis vector (in index order) with a nonzero component
/// orthogonal to range(V), normalized; U~ completes {e1, u2} by the same rule.
inline RotationPlan build_rotation(std::span<const Vector> queries, Index d) {
  const auto T = static_cast<Index>(queries.size());
  require(T >= 1, "build_rotation: at least one query required");
  require(d >= T + 1, "build_rotation: dimension must exceed the number of queries");
  for (const auto& q : queries) require(q.size() == d, "build_rotation: query dimension mismatch");
  constexpr double kAcceptNorm = 1e-8;

  RotationPlan plan;
  plan.V.resize(d, T);
  plan.V.col(0) = unit_vector(d, 0);
  for (Index t = 1; t < T; ++t) plan.V.col(t) = queries[static_cast<std::size_t>(t)];

  std::vector<Vector> range_basis;
  for (Index j = 0; j < T; ++j) {
    Vector r = detail::orthogonal_residual(range_basis, plan.V.col(j));
    const double n = r.norm();
    if (n > kAcceptNorm * std::max(1.0, plan.V.col(j).norm())) range_basis.push_back(r / n);
  }
  // The first query may be nonzero; u2 must avoid it as well.
  {
    Vector r = detail::orthogonal_residual(range_basis, queries[0]);
    const double n = r.norm();
    if (n > kAcceptNorm * std::max(1.0, queries[0].norm())) range_basis.push_back(r / n);
  }

  std::optional<Vector> u2;
  for (Index i = 1; i < d && !u2; ++i) {
    Vector r = detail::orthogonal_residual(range_basis, unit_vector(d, i));
    const double n = r.norm();
    if (n > kAcceptNorm) u2 = r / n;
  }
  if (!u2) throw std::invalid_argument("build_rotation: queries span the whole space");

  std::vector<Vector> columns{unit_vector(d, 0), *u2};
  for (Index i = 0; i < d && static_cast<Index>(columns.size()) < d; ++i) {
    Vector r = detail::orthogonal_residual(columns, unit_vector(d, i));
    const double n = r.norm();
    if (n > kAcceptNorm) columns.push_back(r / n);
  }
  require(static_cast<Index>(columns.size()) == d, "build_rotation: basis completion failed");
  plan.U.resize(d, d);
  for (Index j = 0; j < d; ++j) plan.U.col(j) = columns[static_cast<std::size_t>(j)];
  return plan;
}

/// G(x) = H(U' x): every atom gradient g becomes U g, offsets unchanged.
inline MaxMinFunction build_G(const MaxMinFunction& h, const RotationPlan& plan) {
  require(plan.U.rows() == h.dimension() && plan.U.cols() == h.dimension(), "build_G: dimension mismatch");
  std::vector<MinTerm> terms;
  for (const auto& term : h.terms()) {
    MinTerm rotated;
    for (const auto& atom : term) rotated.push_back({plan.U * atom.gradient, atom.offset});
    terms.push_back(std::move(rotated));
  }
  return MaxMinFunction(h.dimension(), std::move(terms));
}

/// One-dimensional f2(x) = min{x, a + 4|x - m|} with m = (a + b)/2: equal to
/// x away from [a, b] but with a dip of depth (m - a) at m.
inline MaxMinFunction build_tester_f2(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b), "build_tester_f2: non-finite endpoint");
  require(a < b, "build_tester_f2: need a < b");
  const double m = 0.5 * (a + b);
  auto atom = [](double slope, double offset) { return AffineAtom{Vector::Constant(1, slope), offset}; };
  // min{x, max{a + 4(x - m), a - 4(x - m)}} = max{min{x, a + 4(x-m)}, min{x, a - 4(x-m)}}
  return MaxMinFunction(1, {{atom(1.0, 0.0), atom(4.0, a - 4.0 * m)}, {atom(1.0, 0.0), atom(-4.0, a + 4.0 * m)}});
}

}  // namespace nsgas
