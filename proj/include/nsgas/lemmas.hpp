#pragma once

#include <nsgas/constructions.hpp>
#include <nsgas/subdiff.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace nsgas {

struct LemmaOutcome {
  std::string name;
  std::size_t trials = 0;
  bool passed = true;
  std::optional<std::string> counterexample;
};

struct NumericMinimum {
  double value = 0.0;
  double t = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
};

/// min of (t + (1-t) v1)^2 + (1-t)^2 v2^2 over [0,1] x [-1,0] x [1/2,2] by a
/// grid search followed by shrinking-box refinement around the best cell.
inline NumericMinimum minimize_box_quadratic(int t_steps = 201, int v1_steps = 101, int v2_steps = 61) {
  auto q = [](double t, double v1, double v2) {
    const double a = t + (1.0 - t) * v1;
    const double c = (1.0 - t) * v2;
    return a * a + c * c;
  };
  struct Box {
    double lo, hi;
  };
  Box bt{0.0, 1.0}, b1{-1.0, 0.0}, b2{0.5, 2.0};
  NumericMinimum best{std::numeric_limits<double>::infinity(), 0, 0, 0};
  for (int round = 0; round < 40; ++round) {
    const int nt = round == 0 ? t_steps : 21;
    const int n1 = round == 0 ? v1_steps : 21;
    const int n2 = round == 0 ? v2_steps : 21;
    for (int i = 0; i < nt; ++i) {
      const double t = bt.lo + (bt.hi - bt.lo) * i / (nt - 1);
      for (int j = 0; j < n1; ++j) {
        const double v1 = b1.lo + (b1.hi - b1.lo) * j / (n1 - 1);
        for (int k = 0; k < n2; ++k) {
          const double v2 = b2.lo + (b2.hi - b2.lo) * k / (n2 - 1);
          const double v = q(t, v1, v2);
          if (v < best.value) best = {v, t, v1, v2};
        }
      }
    }
    auto shrink = [](Box box, double center, double lo, double hi, int steps) {
      const double half = 2.0 * (box.hi - box.lo) / (steps - 1);
      return Box{std::max(lo, center - half), std::min(hi, center + half)};
    };
    bt = shrink(bt, best.t, 0.0, 1.0, nt);
    b1 = shrink(b1, best.v1, -1.0, 0.0, n1);
    b2 = shrink(b2, best.v2, 0.5, 2.0, n2);
  }
  return best;
}

namespace detail {

template <typename Check>
LemmaOutcome run_trials(std::string name, std::size_t trials, std::uint64_t seed, Check check) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(8, std::thread::hardware_concurrency()));
  const std::size_t chunk = (trials + workers - 1) / workers;
  std::seed_seq seq{seed, static_cast<std::uint64_t>(std::hash<std::string>{}(name))};
  std::vector<std::uint32_t> seeds(workers * 2);
  seq.generate(seeds.begin(), seeds.end());

  std::vector<std::future<std::optional<std::string>>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    const std::uint64_t worker_seed = (static_cast<std::uint64_t>(seeds[2 * w]) << 32) | seeds[2 * w + 1];
    jobs.push_back(std::async(std::launch::async, [=, &check]() -> std::optional<std::string> {
      std::mt19937_64 rng(worker_seed);
      for (std::size_t i = begin; i < end; ++i)
        if (auto bad = check(rng, i)) return bad;
      return std::nullopt;
    }));
  }
  LemmaOutcome out{std::move(name), trials, true, std::nullopt};
  for (auto& job : jobs) {
    auto bad = job.get();
    if (bad && out.passed) {
      out.passed = false;
      out.counterexample = std::move(bad);
    }
  }
  return out;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::string point_text(const Vector& x) {
  std::string s = "(";
  for (Index i = 0; i < x.size(); ++i) s += fmt::format("{}{:.17g}", i ? ", " : "", x(i));
  return s + ")";
}

// The two scalar wedge pieces in local coordinates, evaluated directly from
// their defining formulas rather than from the stored atoms.
struct WedgeFormulas {
  double eta;
  double one(double, double y) const { return y - eta / 2; }
  double two(double x, double) const { return x + eta / 2; }
  double three(double, double y) const { return 2 * y + eta; }
  double four(double, double y) const { return y / 2 + eta; }
  double five(double x, double) const { return -x + 5 * eta / 2; }
  double six(double, double) const { return -eta / 2; }
  double h_tilde(double x, double y) const {
    return std::min({two(x, y), three(x, y), four(x, y)}) + std::min(five(x, y), six(x, y));
  }
  bool in_S3(double x, double y) const {
    return y - eta / 2 <= x && x <= eta / 2 + std::min(2 * y, y / 2);
  }
};

}  // namespace detail

/// Randomized and grid checks of the structural facts the hardness argument
/// rests on, run against the built wedge, H~ and H for `params`.
inline std::vector<LemmaOutcome> verify_lemmas(const ResistingParams& params, std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "verify_lemmas: trials must be positive");
  params.validate();
  const double eta = params.eta;
  const detail::WedgeFormulas w{eta};
  const MaxMinFunction wedge = build_wedge(eta);
  ResistingParams planar = params;
  planar.dimension = std::max<Index>(2, params.dimension);
  const MaxMinFunction H = build_H(planar);
  const MaxMinFunction H_tilde = build_H_tilde(planar);
  const MaxMinFunction F = build_F(planar);
  const Index d = planar.dimension;
  const auto& bp = planar.breakpoints;
  std::vector<LemmaOutcome> out;

  // The ②+⑤ selection is never the value of h.
  out.push_back(detail::run_trials("s2", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
    const double x = detail::uniform(rng, -10 * eta, 10 * eta);
    const double y = detail::uniform(rng, -10 * eta, 10 * eta);
    const bool first = w.two(x, y) <= std::min(w.three(x, y), w.four(x, y));
    const bool second = w.five(x, y) <= w.six(x, y);
    const bool top = w.one(x, y) <= w.two(x, y) + w.five(x, y);
    if (first && second && top) return fmt::format("({:.17g}, {:.17g}) selects the constant piece", x, y);
    return std::nullopt;
  }));

  // The x-piece region is the stated wedge and sits inside a small box.
  out.push_back(detail::run_trials("s3", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
    const double x = detail::uniform(rng, -4 * eta, 4 * eta);
    const double y = detail::uniform(rng, -3 * eta, 4 * eta);
    const bool selected = w.two(x, y) <= std::min(w.three(x, y), w.four(x, y)) && w.six(x, y) <= w.five(x, y) &&
                          w.one(x, y) <= w.two(x, y) + w.six(x, y);
    const bool described = w.in_S3(x, y);
    if (selected != described) return fmt::format("({:.17g}, {:.17g}) region description mismatch", x, y);
    if (described && !(std::abs(x) <= 1.5 * eta && -eta <= y && y <= 2 * eta))
      return fmt::format("({:.17g}, {:.17g}) outside the bounding box", x, y);
    Vector p(2);
    p << x, y;
    const double stored = wedge(p);
    const double formula = std::max(w.one(x, y), w.h_tilde(x, y));
    if (std::abs(stored - formula) > 1e-12 * (1 + std::abs(formula)))
      return fmt::format("({:.17g}, {:.17g}) stored wedge {:.17g} vs formula {:.17g}", x, y, stored, formula);
    return std::nullopt;
  }));

  // Off the x-piece region every gradient lies in [-1,0] x [1/2,2].
  out.push_back(
      detail::run_trials("wedge1dprop", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
        Vector p(2);
        do {
          p << detail::uniform(rng, -20 * eta, 20 * eta), detail::uniform(rng, -20 * eta, 20 * eta);
        } while (w.in_S3(p(0), p(1)));
        const auto g = gradient_at(wedge, p);
        if (!g) return std::nullopt;
        const bool inside = (*g)(0) >= -1.0 && (*g)(0) <= 0.0 && (*g)(1) >= 0.5 && (*g)(1) <= 2.0;
        if (!inside) return fmt::format("{} has gradient {}", detail::point_text(p), detail::point_text(*g));
        return std::nullopt;
      }));

  // Near each breakpoint the x-piece of its own wedge strictly dominates the
  // floor, which strictly dominates every other wedge.
  out.push_back(
      detail::run_trials("strictIneq", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
        const auto t = std::uniform_int_distribution<std::size_t>(0, bp.size() - 1)(rng);
        const double r = eta / 8 * std::sqrt(detail::uniform(rng, 0.0, 1.0));
        const double angle = detail::uniform(rng, 0.0, 2 * M_PI);
        const double x1 = bp[t] + r * std::cos(angle);
        const double x2 = r * std::sin(angle);
        const double own = w.h_tilde(x1 - bp[t], x2);
        const double floor = x2 - eta / 2;
        double others = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < bp.size(); ++s)
          if (s != t) others = std::max(others, w.h_tilde(x1 - bp[s], x2));
        const bool ok = std::abs(own - (x1 - bp[t])) <= 1e-12 && own > floor && floor > others;
        if (!ok) return fmt::format("({:.17g}, {:.17g}) near breakpoint {}", x1, x2, t);
        return std::nullopt;
      }));

  auto sample_upper = [&](std::mt19937_64& rng) {
    Vector x(d);
    do {
      for (Index i = 0; i < d; ++i) x(i) = detail::uniform(rng, -3.0, 3.0);
      x(0) += detail::uniform(rng, bp.front(), bp.back());
    } while (H(x) < -1.0);
    return x;
  };

  // Where H >= -1, the -5 floor is inactive on a ball of radius < 1.
  out.push_back(
      detail::run_trials("HisHtilt", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
        const Vector x = sample_upper(rng);
        const double radius = 2 * 0.4999;
        const Vector y = detail::uniform_in_ball(rng, x, radius);
        if (H(y) != H_tilde(y)) return fmt::format("{} differs from H~ near {}", detail::point_text(y), detail::point_text(x));
        return std::nullopt;
      }));

  // H coincides with F on an η/8 ball around every (b_t, 0) in the first two coordinates.
  out.push_back(detail::run_trials("HisF", trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
    const auto t = std::uniform_int_distribution<std::size_t>(0, bp.size() - 1)(rng);
    Vector y(d);
    for (Index i = 2; i < d; ++i) y(i) = detail::uniform(rng, -10.0, 10.0);
    const double r = eta / 8 * std::sqrt(detail::uniform(rng, 0.0, 1.0));
    const double angle = detail::uniform(rng, 0.0, 2 * M_PI);
    y(0) = bp[t] + r * std::cos(angle);
    y(1) = r * std::sin(angle);
    if (std::abs(H(y) - F(y)) > 1e-12) return fmt::format("H != F at {}", detail::point_text(y));
    return std::nullopt;
  }));

  // Where H >= -1 no point is a low-precision Goldstein stationary point.
  const std::size_t gas_trials = std::min<std::size_t>(trials, 200);
  out.push_back(
      detail::run_trials("noGAS-4", gas_trials, seed, [&](std::mt19937_64& rng, std::size_t) -> std::optional<std::string> {
        const Vector x = sample_upper(rng);
        const double delta = detail::uniform(rng, 0.0, kHardnessBound * (1 - 1e-9));
        const auto cert = certify_gas(H, x, 0.0, delta);
        if (cert.distance < kHardnessBound - 1e-8)
          return fmt::format("{} delta={:.17g} distance {:.17g}", detail::point_text(x), delta, cert.distance);
        return std::nullopt;
      }));

  {
    const auto m = minimize_box_quadratic();
    LemmaOutcome o{"numineq1", 1, std::abs(m.value - 1.0 / 17.0) <= 1e-6, std::nullopt};
    if (!o.passed) o.counterexample = fmt::format("minimum {:.17g} at t={:.17g}", m.value, m.t);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace nsgas
