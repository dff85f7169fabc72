#pragma once

#include <nsgas/lp.hpp>
#include <nsgas/polyhedron.hpp>
#include <nsgas/types.hpp>

#include <algorithm>
#include <compare>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace nsgas {

/// x -> <gradient, x> + offset.
struct AffineAtom {
  Vector gradient;
  double offset = 0.0;

  double operator()(const Vector& x) const { return gradient.dot(x) + offset; }

  friend bool operator==(const AffineAtom& a, const AffineAtom& b) {
    return a.offset == b.offset && exactly_equal(a.gradient, b.gradient);
  }
};

using MinTerm = std::vector<AffineAtom>;

/// Identifies one atom of one term of a MaxMinFunction.
struct PieceId {
  std::size_t term = 0;
  std::size_t atom = 0;
  friend auto operator<=>(const PieceId&, const PieceId&) = default;
};

/// f(x) = max over terms of (min over the term's atoms).
///
/// Atoms repeated verbatim inside a term, and terms repeated verbatim, are
/// dropped at construction; both leave the function unchanged.
class MaxMinFunction {
 public:
  MaxMinFunction(Index dimension, std::vector<MinTerm> terms) : dimension_(dimension) {
    require(dimension > 0, "MaxMinFunction: dimension must be positive");
    require(!terms.empty(), "MaxMinFunction: at least one term required");
    for (auto& term : terms) {
      require(!term.empty(), "MaxMinFunction: empty min-term");
      MinTerm unique;
      for (auto& atom : term) {
        require(atom.gradient.size() == dimension, "MaxMinFunction: atom dimension mismatch");
        require(atom.gradient.allFinite() && std::isfinite(atom.offset), "MaxMinFunction: non-finite atom");
        if (std::find(unique.begin(), unique.end(), atom) == unique.end()) unique.push_back(std::move(atom));
      }
      if (std::find(terms_.begin(), terms_.end(), unique) == terms_.end()) terms_.push_back(std::move(unique));
    }
  }

  static MaxMinFunction affine(AffineAtom atom) {
    const Index d = atom.gradient.size();
    return MaxMinFunction(d, {{std::move(atom)}});
  }

  Index dimension() const { return dimension_; }
  const std::vector<MinTerm>& terms() const { return terms_; }
  const AffineAtom& atom(PieceId id) const { return terms_.at(id.term).at(id.atom); }

  std::size_t atom_count() const {
    std::size_t n = 0;
    for (const auto& t : terms_) n += t.size();
    return n;
  }

  bool is_affine() const { return terms_.size() == 1 && terms_.front().size() == 1; }

  double term_value(std::size_t t, const Vector& x) const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& atom : terms_[t]) v = std::min(v, atom(x));
    return v;
  }

  /// Unchecked evaluation; see evaluate() for the checked entry point.
  double operator()(const Vector& x) const {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < terms_.size(); ++t) v = std::max(v, term_value(t, x));
    return v;
  }

  friend bool operator==(const MaxMinFunction& a, const MaxMinFunction& b) {
    return a.dimension_ == b.dimension_ && a.terms_ == b.terms_;
  }

 private:
  Index dimension_;
  std::vector<MinTerm> terms_;
};

inline double evaluate(const MaxMinFunction& f, const Vector& x) {
  require(x.size() == f.dimension(), "evaluate: dimension mismatch");
  return f(x);
}

/// Global Lipschitz constant: the largest atom gradient norm.
inline double lipschitz_certificate(const MaxMinFunction& f) {
  double l = 0.0;
  for (const auto& term : f.terms())
    for (const auto& atom : term) l = std::max(l, atom.gradient.norm());
  return l;
}

/// Class parameters (Lipschitz bound, f(0) - inf f, dimension) a function is claimed to satisfy.
struct FunctionMeta {
  double lipschitz_bound = 1.0;
  double value_gap = 0.0;
  Index dimension = 1;

  FunctionMeta(double lipschitz, double gap, Index d) : lipschitz_bound(lipschitz), value_gap(gap), dimension(d) {
    require(lipschitz_bound > 0.0, "FunctionMeta: lipschitz bound must be positive");
    require(value_gap >= 0.0, "FunctionMeta: value gap must be nonnegative");
    require(dimension > 0, "FunctionMeta: dimension must be positive");
  }
};

inline double tie_tolerance(double value) { return 1e-12 * (1.0 + std::abs(value)); }

/// Gradient at x if x lies in the interior of a single affine piece, nullopt at kinks.
inline std::optional<Vector> gradient_at(const MaxMinFunction& f, const Vector& x) {
  require(x.size() == f.dimension(), "gradient_at: dimension mismatch");
  const auto& terms = f.terms();
  double best = -std::numeric_limits<double>::infinity();
  const AffineAtom* winner = nullptr;
  std::vector<std::pair<double, const AffineAtom*>> term_minima;
  term_minima.reserve(terms.size());
  for (const auto& term : terms) {
    double lo = std::numeric_limits<double>::infinity();
    const AffineAtom* arg = nullptr;
    for (const auto& atom : term) {
      const double v = atom(x);
      if (v < lo) {
        lo = v;
        arg = &atom;
      }
    }
    for (const auto& atom : term)
      if (&atom != arg && atom(x) <= lo + tie_tolerance(lo) && !exactly_equal(atom.gradient, arg->gradient))
        return std::nullopt;
    term_minima.emplace_back(lo, arg);
    if (lo > best) {
      best = lo;
      winner = arg;
    }
  }
  for (const auto& [v, atom] : term_minima)
    if (atom != winner && v >= best - tie_tolerance(best) && !exactly_equal(atom->gradient, winner->gradient))
      return std::nullopt;
  return winner->gradient;
}

/// One-sided directional derivative f'(z; direction) from the max-min structure.
inline double directional_derivative(const MaxMinFunction& f, const Vector& z, const Vector& direction) {
  require(z.size() == f.dimension() && direction.size() == f.dimension(),
          "directional_derivative: dimension mismatch");
  const double fz = f(z);
  double out = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < f.terms().size(); ++t) {
    const double tv = f.term_value(t, z);
    if (tv < fz - tie_tolerance(fz)) continue;
    double slope = std::numeric_limits<double>::infinity();
    for (const auto& atom : f.terms()[t])
      if (atom(z) <= tv + tie_tolerance(tv)) slope = std::min(slope, atom.gradient.dot(direction));
    out = std::max(out, slope);
  }
  return out;
}

/// Finite generator set whose convex hull is a (Clarke or Goldstein) subdifferential.
struct GradientPolytope {
  std::vector<Vector> generators;
  std::vector<PieceId> sources;

  std::size_t size() const { return generators.size(); }
  Index dimension() const { return generators.empty() ? 0 : generators.front().size(); }
};

/// A closed full-dimensional region on which f coincides with one atom.
struct LocalPiece {
  PieceId id;
  Polyhedron region;
};

enum class PieceScan {
  distinct_gradients,  // one region per gradient value suffices
  all_regions,         // every full-dimensional branch region
};

namespace detail {

constexpr double kInteriorTolerance = 1e-9;
constexpr double kBallTolerance = 1e-9;

// a(y) <= b(y)
inline void add_atom_order(Polyhedron& poly, const AffineAtom& a, const AffineAtom& b) {
  poly.add_halfspace(a.gradient - b.gradient, b.offset - a.offset);
}

}  // namespace detail

/// Full-dimensional regions of f's pieces that meet the closed ball B_delta(x).
///
/// Each region is a polyhedron on which f equals the atom `id`. Atoms and terms
/// that provably cannot matter on a slightly enlarged ball are pruned through
/// interval bounds, and the dropped inequalities hold strictly there, so the
/// reported regions agree with the true pieces near the ball.
inline std::vector<LocalPiece> pieces_near(const MaxMinFunction& f, const Vector& x, double delta,
                                           PieceScan scan = PieceScan::distinct_gradients) {
  require(x.size() == f.dimension(), "pieces_near: dimension mismatch");
  require(delta >= 0.0, "pieces_near: delta must be nonnegative");
  const auto& terms = f.terms();
  const std::size_t n_terms = terms.size();
  const double radius = delta + 1e-7 * (1.0 + delta);

  std::vector<std::vector<double>> lo(n_terms), hi(n_terms);
  std::vector<double> term_lo(n_terms), term_hi(n_terms);
  for (std::size_t t = 0; t < n_terms; ++t) {
    term_lo[t] = term_hi[t] = std::numeric_limits<double>::infinity();
    for (const auto& atom : terms[t]) {
      const double v = atom(x);
      const double spread = atom.gradient.norm() * radius;
      lo[t].push_back(v - spread);
      hi[t].push_back(v + spread);
      term_lo[t] = std::min(term_lo[t], v - spread);
      term_hi[t] = std::min(term_hi[t], v + spread);
    }
  }
  const double global_lo = *std::max_element(term_lo.begin(), term_lo.end());

  std::vector<std::vector<std::size_t>> candidates(n_terms);
  for (std::size_t t = 0; t < n_terms; ++t)
    for (std::size_t a = 0; a < terms[t].size(); ++a)
      if (lo[t][a] <= term_hi[t]) candidates[t].push_back(a);

  auto qualifies = [&](const Polyhedron& poly) {
    const auto sys = detail::reduce(poly);
    const auto r = detail::inscribed_radius(sys, 1.0);
    if (!r || *r <= detail::kInteriorTolerance) return false;
    return detail::project(sys, x).distance <= delta + detail::kBallTolerance;
  };

  std::vector<LocalPiece> out;
  std::vector<Vector> seen_gradients;

  for (std::size_t ts = 0; ts < n_terms; ++ts) {
    if (term_hi[ts] < global_lo) continue;
    for (std::size_t a : candidates[ts]) {
      const AffineAtom& atom = terms[ts][a];
      if (scan == PieceScan::distinct_gradients &&
          std::any_of(seen_gradients.begin(), seen_gradients.end(),
                      [&](const Vector& g) { return exactly_equal(g, atom.gradient); }))
        continue;

      Polyhedron base(f.dimension());
      for (std::size_t b : candidates[ts])
        if (b != a) detail::add_atom_order(base, atom, terms[ts][b]);

      // For every other term some atom must lie below `atom`.
      std::vector<std::pair<std::size_t, std::vector<std::size_t>>> branches;
      bool impossible = false;
      for (std::size_t t = 0; t < n_terms && !impossible; ++t) {
        if (t == ts || term_hi[t] < lo[ts][a]) continue;
        std::vector<std::size_t> below;
        bool free_choice = false;
        for (std::size_t b : candidates[t]) {
          if (lo[t][b] > hi[ts][a]) continue;
          const AffineAtom& other = terms[t][b];
          if (exactly_equal(other.gradient, atom.gradient) && other.offset <= atom.offset) free_choice = true;
          below.push_back(b);
        }
        if (free_choice) continue;
        if (below.empty()) impossible = true;
        else branches.emplace_back(t, std::move(below));
      }
      if (impossible) continue;
      std::sort(branches.begin(), branches.end(),
                [](const auto& l, const auto& r) { return l.second.size() < r.second.size(); });

      bool found = false;
      std::function<void(std::size_t, const Polyhedron&)> descend = [&](std::size_t level, const Polyhedron& poly) {
        if (found && scan == PieceScan::distinct_gradients) return;
        if (!qualifies(poly)) return;
        if (level == branches.size()) {
          out.push_back({{ts, a}, poly});
          found = true;
          return;
        }
        const auto& [t, below] = branches[level];
        for (std::size_t b : below) {
          Polyhedron next = poly;
          detail::add_atom_order(next, terms[t][b], atom);
          descend(level + 1, next);
          if (found && scan == PieceScan::distinct_gradients) return;
        }
      };
      descend(0, base);
      if (found) seen_gradients.push_back(atom.gradient);
    }
  }
  return out;
}

/// Gradients of all pieces whose full-dimensional region meets B_delta(x).
inline GradientPolytope gradients_near(const MaxMinFunction& f, const Vector& x, double delta) {
  GradientPolytope out;
  for (auto& piece : pieces_near(f, x, delta, PieceScan::distinct_gradients)) {
    out.generators.push_back(f.atom(piece.id).gradient);
    out.sources.push_back(piece.id);
  }
  return out;
}

/// Generators of the Clarke subdifferential at x: gradients of pieces whose
/// full-dimensional region contains x in its closure.
inline GradientPolytope essentially_active_gradients(const MaxMinFunction& f, const Vector& x) {
  return gradients_near(f, x, 0.0);
}

/// A cell of the canonical partition: `atom_indices[t]` is the minimizing atom
/// of term t, and term `term_index` attains the maximum.
struct PieceSelection {
  std::size_t term_index = 0;
  std::vector<std::size_t> atom_indices;
  Polyhedron region;

  PieceId winner() const { return {term_index, atom_indices.at(term_index)}; }
};

/// Every full-dimensional cell of the canonical partition. Exponential in the
/// number of terms in the worst case; intended for small functions.
inline std::vector<PieceSelection> enumerate_pieces(const MaxMinFunction& f) {
  const auto& terms = f.terms();
  std::vector<PieceSelection> out;
  std::vector<std::size_t> choice(terms.size());
  std::function<void(std::size_t, const Polyhedron&)> descend = [&](std::size_t t, const Polyhedron& poly) {
    if (!is_full_dimensional(poly)) return;
    if (t == terms.size()) {
      for (std::size_t ts = 0; ts < terms.size(); ++ts) {
        Polyhedron cell = poly;
        for (std::size_t other = 0; other < terms.size(); ++other)
          if (other != ts) detail::add_atom_order(cell, terms[other][choice[other]], terms[ts][choice[ts]]);
        if (is_full_dimensional(cell)) out.push_back({ts, choice, std::move(cell)});
      }
      return;
    }
    for (std::size_t a = 0; a < terms[t].size(); ++a) {
      Polyhedron next = poly;
      for (std::size_t b = 0; b < terms[t].size(); ++b)
        if (b != a) detail::add_atom_order(next, terms[t][a], terms[t][b]);
      choice[t] = a;
      descend(t + 1, next);
    }
  };
  descend(0, Polyhedron(f.dimension()));
  return out;
}

/// Number of distinct winning (term, atom) pairs among the cells.
inline std::size_t distinct_piece_count(const std::vector<PieceSelection>& cells) {
  std::vector<PieceId> ids;
  for (const auto& c : cells) ids.push_back(c.winner());
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

struct Infimum {
  double value = 0.0;
  std::optional<Vector> minimizer;  // empty when the infimum is -inf
};

/// inf f, solved exactly as one LP per cell of the canonical partition.
inline Infimum infimum(const MaxMinFunction& f) {
  Infimum out{std::numeric_limits<double>::infinity(), std::nullopt};
  for (const auto& cell : enumerate_pieces(f)) {
    const AffineAtom& atom = f.atom(cell.winner());
    const LpResult lp = minimize_linear(atom.gradient, cell.region.normals(), cell.region.bounds());
    if (lp.status == LpStatus::unbounded) return {-std::numeric_limits<double>::infinity(), std::nullopt};
    if (lp.status != LpStatus::optimal) continue;
    const double v = f(lp.solution);
    if (v < out.value) {
      out.value = v;
      out.minimizer = lp.solution;
    }
  }
  return out;
}

}  // namespace nsgas
