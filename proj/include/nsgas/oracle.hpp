#pragma once

#include <nsgas/constructions.hpp>
#include <nsgas/pa_core.hpp>
#include <nsgas/types.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nsgas {

/// What an algorithm sees from a query: a function agreeing with f on some
/// undisclosed ball around the query, and the value there.
struct GermView {
  MaxMinFunction local_function;
  double value = 0.0;

  friend bool operator==(const GermView& a, const GermView& b) {
    return a.value == b.value && a.local_function == b.local_function;
  }
};

struct LocalGerm {
  GermView view;
  double hidden_radius = 0.0;  // not part of the view
};

/// The restriction of f to a ball around x on which the active atoms do not
/// change. Terms within tie tolerance of f(x) and, inside them, atoms within
/// tie tolerance of the term value are kept; everything else is dropped.
/// hidden_radius is half a certified lower bound on how far x is from any
/// dropped atom or term becoming active, capped at 1.
inline LocalGerm local_oracle(const MaxMinFunction& f, const Vector& x) {
  require(x.size() == f.dimension(), "local_oracle: dimension mismatch");
  const auto& terms = f.terms();
  const double fx = f(x);
  double certified = std::numeric_limits<double>::infinity();

  std::vector<MinTerm> kept_terms;
  double kept_lipschitz = 0.0;
  std::vector<std::pair<double, double>> dropped_terms;  // (gap, lipschitz)
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double tv = f.term_value(t, x);
    double term_lipschitz = 0.0;
    for (const auto& atom : terms[t]) term_lipschitz = std::max(term_lipschitz, atom.gradient.norm());
    if (tv < fx - tie_tolerance(fx)) {
      dropped_terms.emplace_back(fx - tv, term_lipschitz);
      continue;
    }
    MinTerm active;
    double active_lipschitz = 0.0;
    for (const auto& atom : terms[t]) {
      if (atom(x) <= tv + tie_tolerance(tv)) {
        active.push_back(atom);
        active_lipschitz = std::max(active_lipschitz, atom.gradient.norm());
      }
    }
    for (const auto& atom : terms[t]) {
      const double gap = atom(x) - tv;
      if (gap > tie_tolerance(tv)) {
        const double rate = atom.gradient.norm() + active_lipschitz;
        if (rate > 0.0) certified = std::min(certified, gap / rate);
      }
    }
    kept_lipschitz = std::max(kept_lipschitz, active_lipschitz);
    kept_terms.push_back(std::move(active));
  }
  for (const auto& [gap, lipschitz] : dropped_terms) {
    const double rate = lipschitz + kept_lipschitz;
    if (rate > 0.0) certified = std::min(certified, gap / rate);
  }
  LocalGerm out{GermView{MaxMinFunction(f.dimension(), std::move(kept_terms)), fx}, 0.0};
  out.hidden_radius = std::min(1.0, 0.5 * certified);
  return out;
}

enum class AdversaryMode { gzr, general };

struct AdversaryConfig {
  Index T = 1;
  Index d = 2;
  AdversaryMode mode = AdversaryMode::gzr;

  void validate() const {
    require(T >= 1, "AdversaryConfig: T must be positive");
    if (mode == AdversaryMode::gzr) require(d >= 2, "AdversaryConfig: gzr mode needs d >= 2");
    else require(d >= T + 1, "AdversaryConfig: general mode needs d >= T + 1");
  }
};

enum class TranscriptPhase { collecting, materialized };

struct Transcript {
  std::vector<Vector> queries;
  std::vector<GermView> germs;
  TranscriptPhase phase = TranscriptPhase::collecting;

  std::size_t size() const { return queries.size(); }
};

struct Materialized {
  MaxMinFunction function;
  ResistingParams params;
  std::optional<RotationPlan> rotation;
  bool consistent = true;
  std::optional<std::size_t> first_inconsistent;  // 0-based query index
};

/// The resisting oracle: every query x is answered with the germ x1 - x1(query)
/// and value 0, and a function consistent with all answers is chosen only
/// once the queries are in.
class ResistingAdversary {
 public:
  explicit ResistingAdversary(AdversaryConfig config) : config_(config) { config_.validate(); }

  const AdversaryConfig& config() const { return config_; }
  const Transcript& transcript() const { return transcript_; }

  GermView answer(const Vector& x) {
    require(transcript_.phase == TranscriptPhase::collecting, "ResistingAdversary: already materialized");
    require(static_cast<Index>(transcript_.size()) < config_.T, "ResistingAdversary: query budget exhausted");
    require(x.size() == config_.d, "ResistingAdversary: query dimension mismatch");
    require(x.allFinite(), "ResistingAdversary: non-finite query");
    GermView germ{MaxMinFunction::affine({unit_vector(config_.d, 0), -x(0)}), 0.0};
    transcript_.queries.push_back(x);
    transcript_.germs.push_back(germ);
    return germ;
  }

  /// H for gzr mode, G = H o U' for general mode. Consistency of every
  /// recorded answer with the returned function is checked and reported.
  Materialized materialize() {
    require(transcript_.phase == TranscriptPhase::collecting, "ResistingAdversary: already materialized");
    require(transcript_.size() > 0, "ResistingAdversary: no queries to materialize");
    std::vector<double> first;
    for (const auto& q : transcript_.queries) first.push_back(q(0));
    auto params = ResistingParams::from_first_coordinates(std::move(first), config_.d);
    MaxMinFunction h = build_H(params);
    std::optional<RotationPlan> rotation;
    if (config_.mode == AdversaryMode::general) {
      rotation = build_rotation(transcript_.queries, config_.d);
      h = build_G(h, *rotation);
    }
    Materialized out{std::move(h), std::move(params), std::move(rotation), true, std::nullopt};
    for (std::size_t i = 0; i < transcript_.size(); ++i) {
      if (!(local_oracle(out.function, transcript_.queries[i]).view == transcript_.germs[i])) {
        out.consistent = false;
        out.first_inconsistent = i;
        break;
      }
    }
    transcript_.phase = TranscriptPhase::materialized;
    return out;
  }

 private:
  AdversaryConfig config_;
  Transcript transcript_;
};

}  // namespace nsgas
