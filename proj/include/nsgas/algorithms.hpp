#pragma once

#include <nsgas/constructions.hpp>
#include <nsgas/min_norm.hpp>
#include <nsgas/oracle.hpp>
#include <nsgas/subdiff.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nsgas {

/// One oracle exchange as seen by an algorithm.
struct Exchange {
  Vector query;
  GermView germ;
};

using GermOracle = std::function<GermView(const Vector&)>;

inline GermOracle frozen_oracle(const MaxMinFunction& f) {
  return [f](const Vector& x) { return local_oracle(f, x).view; };
}

/// A deterministic algorithm over germs: the next query depends only on the
/// exchange history, and the first query (empty history) is `start()`.
class DeterministicAlgorithm {
 public:
  virtual ~DeterministicAlgorithm() = default;
  virtual std::string name() const = 0;
  virtual Vector next_query(std::span<const Exchange> history, Index dimension) const = 0;
};

/// Lexicographically smallest gradient among the germ's essentially active
/// pieces at x.
inline Vector germ_subgradient(const GermView& germ, const Vector& x) {
  const auto& f = germ.local_function;
  if (f.is_affine()) return f.terms().front().front().gradient;
  if (auto g = gradient_at(f, x)) return *g;
  const auto polytope = essentially_active_gradients(f, x);
  require(polytope.size() > 0, "germ_subgradient: no active gradient");
  Vector best = polytope.generators.front();
  for (const auto& g : polytope.generators)
    if (lexicographically_less(g, best)) best = g;
  return best;
}

/// x_{t+1} = x_t - step * g_t with g_t from germ_subgradient.
class SubgradientDescent final : public DeterministicAlgorithm {
 public:
  explicit SubgradientDescent(double step, std::optional<Vector> x0 = std::nullopt) : step_(step), x0_(std::move(x0)) {
    require(step > 0.0, "SubgradientDescent: step must be positive");
  }
  std::string name() const override { return "subgradient_descent"; }
  Vector next_query(std::span<const Exchange> history, Index dimension) const override {
    if (history.empty()) return x0_ ? *x0_ : Vector::Zero(dimension);
    const auto& last = history.back();
    return last.query - step_ * germ_subgradient(last.germ, last.query);
  }

 private:
  double step_;
  std::optional<Vector> x0_;
};

/// Normalized steps of length step0 / sqrt(t + 1); stays put on a zero subgradient.
class DiminishingSubgradient final : public DeterministicAlgorithm {
 public:
  explicit DiminishingSubgradient(double step0) : step0_(step0) {
    require(step0 > 0.0, "DiminishingSubgradient: step must be positive");
  }
  std::string name() const override { return "diminishing_subgradient"; }
  Vector next_query(std::span<const Exchange> history, Index dimension) const override {
    if (history.empty()) return Vector::Zero(dimension);
    const auto& last = history.back();
    const Vector g = germ_subgradient(last.germ, last.query);
    const double n = g.norm();
    if (n == 0.0) return last.query;
    const double step = step0_ / std::sqrt(static_cast<double>(history.size()));
    return last.query - (step / n) * g;
  }

 private:
  double step0_;
};

/// Queries a center, then center +- radius * e_j for each probed coordinate,
/// and moves the center by a normalized step against the min-norm point of
/// the collected germ gradients. With `touched_only` the probed coordinates
/// are those along which some germ seen so far varies.
class StencilSampling final : public DeterministicAlgorithm {
 public:
  StencilSampling(double step, double radius, bool touched_only) : step_(step), radius_(radius), touched_only_(touched_only) {
    require(step > 0.0 && radius > 0.0, "StencilSampling: step and radius must be positive");
  }
  std::string name() const override { return touched_only_ ? "stencil_sampling" : "coordinate_stencil"; }

  Vector next_query(std::span<const Exchange> history, Index dimension) const override {
    Vector center = Vector::Zero(dimension);
    std::set<Index> touched;
    std::vector<Vector> stencil;  // pending probe points of the current cycle
    std::vector<Vector> gradients;
    std::size_t pending = 0;
    bool awaiting_center = true;

    for (const auto& ex : history) {
      const Vector g = germ_subgradient(ex.germ, ex.query);
      for (Index j = 0; j < dimension; ++j)
        if (g(j) != 0.0) touched.insert(j);
      gradients.push_back(g);
      if (awaiting_center) {
        stencil.clear();
        for (Index j = 0; j < dimension; ++j) {
          if (touched_only_ && !touched.contains(j)) continue;
          stencil.push_back(center + radius_ * unit_vector(dimension, j));
          stencil.push_back(center - radius_ * unit_vector(dimension, j));
        }
        pending = 0;
        awaiting_center = false;
      } else {
        ++pending;
      }
      if (pending == stencil.size()) {
        const auto mn = min_norm_point(std::span<const Vector>(gradients));
        const double n = mn.point.norm();
        if (n > 0.0) center = center - (step_ / n) * mn.point;
        gradients.clear();
        awaiting_center = true;
      }
    }
    if (awaiting_center) return center;
    return stencil[pending];
  }

 private:
  double step_;
  double radius_;
  bool touched_only_;
};

struct QueryRun {
  std::vector<Exchange> exchanges;

  std::vector<Vector> queries() const {
    std::vector<Vector> out;
    for (const auto& e : exchanges) out.push_back(e.query);
    return out;
  }
};

/// Runs a deterministic algorithm for T queries against an oracle.
inline QueryRun run_queries(const DeterministicAlgorithm& algorithm, const GermOracle& oracle, Index dimension, Index T) {
  QueryRun run;
  for (Index t = 0; t < T; ++t) {
    Vector q = algorithm.next_query(run.exchanges, dimension);
    require(q.size() == dimension && q.allFinite(), algorithm.name() + ": produced an invalid query");
    GermView germ = oracle(q);
    run.exchanges.push_back({std::move(q), std::move(germ)});
  }
  return run;
}

/// Coordinates along which f varies arbitrarily close to x.
inline std::set<Index> touched_coordinates(const MaxMinFunction& f, const Vector& x) {
  std::set<Index> out;
  for (const auto& g : essentially_active_gradients(f, x).generators)
    for (Index j = 0; j < g.size(); ++j)
      if (g(j) != 0.0) out.insert(j);
  return out;
}

/// nullopt when every iterate's support lies in the coordinates touched at
/// earlier iterates; otherwise the 1-based index of the first violation.
inline std::optional<std::size_t> gzr_check(const MaxMinFunction& f, std::span<const Vector> trajectory) {
  std::set<Index> touched;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Vector& x = trajectory[t];
    for (Index j = 0; j < x.size(); ++j)
      if (x(j) != 0.0 && !touched.contains(j)) return t + 1;
    for (Index j : touched_coordinates(f, x)) touched.insert(j);
  }
  return std::nullopt;
}

struct RunResult {
  std::vector<Vector> trajectory;
  std::vector<double> values;
  std::vector<double> distances;  // dist(0, ∂_δ f(x_t))
  std::vector<bool> certified;    // distances[t] <= epsilon
  double best_distance = std::numeric_limits<double>::infinity();
  std::size_t step_count = 0;
  bool converged = false;
};

/// Evaluates f and the exact Goldstein distance along a trajectory.
inline RunResult assess(const MaxMinFunction& f, std::vector<Vector> trajectory, double epsilon, double delta) {
  RunResult out;
  out.trajectory = std::move(trajectory);
  out.step_count = out.trajectory.size();
  for (const auto& x : out.trajectory) {
    const auto cert = certify_gas(f, x, epsilon, delta);
    out.values.push_back(f(x));
    out.distances.push_back(cert.distance);
    out.certified.push_back(cert.satisfied);
    out.best_distance = std::min(out.best_distance, cert.distance);
    out.converged = out.converged || cert.satisfied;
  }
  return out;
}

/// Convenience wrapper: subgradient descent from x0 for T queries on a fixed f.
inline RunResult subgradient_descent(const MaxMinFunction& f, const Vector& x0, double step, Index T, double epsilon,
                                     double delta) {
  const SubgradientDescent alg(step, x0);
  return assess(f, run_queries(alg, frozen_oracle(f), f.dimension(), T).queries(), epsilon, delta);
}

/// x <- x - δ g/|g| with g the min-norm element of ∂_δ f(x), until
/// (ε, δ)-stationarity is certified. Needs the whole function, not germs.
/// step_count is the number of moves made.
inline RunResult goldstein_conceptual(const MaxMinFunction& f, const Vector& x0, double epsilon, double delta,
                                      std::size_t max_steps) {
  require(epsilon > 0.0 && delta > 0.0, "goldstein_conceptual: epsilon and delta must be positive");
  require(x0.size() == f.dimension(), "goldstein_conceptual: dimension mismatch");
  RunResult out;
  Vector x = x0;
  for (std::size_t step = 0;; ++step) {
    const auto cert = certify_gas(f, x, epsilon, delta);
    out.trajectory.push_back(x);
    out.values.push_back(f(x));
    out.distances.push_back(cert.distance);
    out.certified.push_back(cert.satisfied);
    out.best_distance = std::min(out.best_distance, cert.distance);
    if (cert.satisfied) {
      out.converged = true;
      out.step_count = step;
      return out;
    }
    if (step == max_steps) {
      out.step_count = step;
      return out;
    }
    Vector g = Vector::Zero(f.dimension());
    for (std::size_t i = 0; i < cert.generators.size(); ++i) g += cert.weights(static_cast<Index>(i)) * cert.generators[i];
    Vector next = x - (delta / g.norm()) * g;
    if (!(f(next) <= f(x) - delta * epsilon + 1e-9))
      throw std::logic_error("goldstein_conceptual: sufficient decrease violated");
    x = std::move(next);
  }
}

struct GradientSamplingOptions {
  double epsilon = 0.1;
  double delta = 0.2;
  std::size_t samples = 20;
  std::size_t max_steps = 1000;
};

/// Randomized: at each step the germ gradients at `samples` uniform points of
/// B_δ(x) span a hull whose min-norm point ĝ is used as x <- x - δ ĝ/|ĝ|.
/// Stops once |ĝ| <= ε. Every visited point is then certified exactly.
inline RunResult gradient_sampling(const MaxMinFunction& f, const Vector& x0, const GradientSamplingOptions& opt,
                                   std::uint64_t seed) {
  require(opt.samples >= 1, "gradient_sampling: need at least one sample");
  require(opt.delta > 0.0 && opt.epsilon >= 0.0, "gradient_sampling: invalid tolerances");
  std::mt19937_64 rng(seed);
  std::vector<Vector> trajectory{x0};
  Vector x = x0;
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    std::vector<Vector> gradients;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const Vector y = detail::uniform_in_ball(rng, x, opt.delta);
      const Vector g = germ_subgradient(local_oracle(f, y).view, y);
      if (std::none_of(gradients.begin(), gradients.end(), [&](const Vector& h) { return exactly_equal(g, h); }))
        gradients.push_back(g);
    }
    const auto mn = min_norm_point(std::span<const Vector>(gradients));
    if (mn.distance <= opt.epsilon) break;
    x = x - (opt.delta / mn.distance) * mn.point;
    trajectory.push_back(x);
  }
  RunResult out = assess(f, std::move(trajectory), opt.epsilon, opt.delta);
  out.step_count = out.trajectory.size() - 1;
  out.converged = out.certified.back();
  return out;
}

/// Queries 0 and δ e1, the two points that suffice on a fixed resisting
/// function with a kink within δ of the origin.
inline std::pair<Vector, Vector> two_query_gas_finder(Index dimension, double delta) {
  require(delta > 0.0, "two_query_gas_finder: delta must be positive");
  return {Vector::Zero(dimension), delta * unit_vector(dimension, 0)};
}

/// Named deterministic algorithms for experiments.
inline std::unique_ptr<DeterministicAlgorithm> make_algorithm(const std::string& id, double step, double radius) {
  if (id == "subgradient_descent") return std::make_unique<SubgradientDescent>(step);
  if (id == "diminishing_subgradient") return std::make_unique<DiminishingSubgradient>(step);
  if (id == "stencil_sampling") return std::make_unique<StencilSampling>(step, radius, true);
  if (id == "coordinate_stencil") return std::make_unique<StencilSampling>(step, radius, false);
  throw std::invalid_argument("unknown deterministic algorithm: " + id);
}

/// Deterministic algorithms whose queries stay in touched coordinates.
inline std::vector<std::string> zero_respecting_zoo() {
  return {"subgradient_descent", "diminishing_subgradient", "stencil_sampling"};
}

/// Every deterministic algorithm available to experiments.
inline std::vector<std::string> deterministic_zoo() {
  return {"subgradient_descent", "diminishing_subgradient", "stencil_sampling", "coordinate_stencil"};
}

}  // namespace nsgas
