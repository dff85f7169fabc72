#pragma once

#include <nsgas/algorithms.hpp>
#include <nsgas/constructions.hpp>
#include <nsgas/io.hpp>
#include <nsgas/oracle.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nsgas {

enum class ExperimentMode { gzr, general, frozen };

inline std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::gzr: return "gzr";
    case ExperimentMode::general: return "general";
    case ExperimentMode::frozen: return "frozen";
  }
  return "unknown";
}

inline ExperimentMode parse_mode(const std::string& s) {
  if (s == "gzr") return ExperimentMode::gzr;
  if (s == "general") return ExperimentMode::general;
  if (s == "frozen" || s == "frozen-instance") return ExperimentMode::frozen;
  throw std::invalid_argument("unknown mode: " + s);
}

/// Raised for configurations that can never run (bad mode, algorithm, bounds).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::gzr;
  std::string algorithm = "subgradient_descent";
  double step = 0.25;     // step length of the deterministic algorithms
  double radius = 0.05;   // stencil probe radius
  std::size_t samples = 20;
  std::size_t max_steps = 1000;
  Index T = 16;
  Index d = 2;
  double epsilon = 0.2;
  double delta = 0.2;
  std::uint64_t seed = 0;
  std::optional<MaxMinFunction> frozen_function;  // frozen mode; defaults to H with breakpoint 0

  bool randomized() const { return algorithm == "gradient_sampling"; }

  void validate() const {
    if (T < 1) throw ConfigError("T must be positive");
    if (d < 1) throw ConfigError("d must be positive");
    if (!(epsilon > 0.0) || !(delta > 0.0)) throw ConfigError("epsilon and delta must be positive");
    if (mode == ExperimentMode::frozen) {
      if (frozen_function && frozen_function->dimension() != d) throw ConfigError("frozen function dimension differs from d");
      if (!frozen_function && d < 2) throw ConfigError("the default frozen instance needs d >= 2");
      return;
    }
    if (randomized()) throw ConfigError("randomized algorithms are only run on frozen instances");
    if (mode == ExperimentMode::gzr && d < 2) throw ConfigError("gzr mode needs d >= 2");
    if (mode == ExperimentMode::general && d < T + 1) throw ConfigError("general mode needs d >= T + 1");
    if (!(epsilon < kHardnessBound) || !(delta < kHardnessBound))
      throw ConfigError("adversary experiments need epsilon, delta < 1/sqrt(17)");
  }
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string algorithm_name;
  RunResult run;
  std::optional<ResistingParams> params;     // breakpoints, sigma, eta of the materialized function
  std::optional<MaxMinFunction> function;    // the function the run is assessed on
  std::optional<Transcript> transcript;      // adversary modes only
  bool replay_verified = false;
  std::optional<std::size_t> gzr_violation;  // 1-based
  std::string verdict;
};

inline MaxMinFunction default_frozen_instance(Index d) {
  return build_H(ResistingParams::from_first_coordinates({0.0}, d));
}

/// Reruns a deterministic algorithm against local germs of f and compares
/// queries and germs with the transcript exactly.
inline bool replay_verify(const Transcript& transcript, const MaxMinFunction& f, const DeterministicAlgorithm& algorithm) {
  if (transcript.size() == 0) return true;
  const GermOracle oracle = frozen_oracle(f);
  std::vector<Exchange> history;
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    Vector q = algorithm.next_query(history, f.dimension());
    if (!exactly_equal(q, transcript.queries[i])) return false;
    GermView germ = oracle(q);
    if (i < transcript.germs.size() && !(germ == transcript.germs[i])) return false;
    history.push_back({std::move(q), std::move(germ)});
  }
  return true;
}

namespace detail {

inline std::string adversary_verdict(const RunResult& run, bool consistent) {
  if (!consistent) return "algorithm-escaped";
  for (double dist : run.distances)
    if (dist < kHardnessBound - 1e-8) return "algorithm-escaped";
  return "hardness-reproduced";
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;

  if (config.mode == ExperimentMode::frozen) {
    MaxMinFunction f = config.frozen_function ? *config.frozen_function : default_frozen_instance(config.d);
    if (config.randomized()) {
      report.algorithm_name = "gradient_sampling";
      GradientSamplingOptions opt{config.epsilon, config.delta, config.samples, config.max_steps};
      report.run = gradient_sampling(f, Vector::Zero(config.d), opt, config.seed);
      report.replay_verified = false;
    } else {
      const auto alg = make_algorithm(config.algorithm, config.step, config.radius);
      report.algorithm_name = alg->name();
      const auto run = run_queries(*alg, frozen_oracle(f), config.d, config.T);
      Transcript tr;
      for (const auto& e : run.exchanges) {
        tr.queries.push_back(e.query);
        tr.germs.push_back(e.germ);
      }
      report.replay_verified = replay_verify(tr, f, *alg);
      if (!report.replay_verified) throw std::logic_error(alg->name() + ": replay diverged on a frozen instance");
      report.run = assess(f, run.queries(), config.epsilon, config.delta);
      report.transcript = std::move(tr);
    }
    report.gzr_violation = gzr_check(f, report.run.trajectory);
    report.verdict = report.run.converged ? "converged" : "not-converged";
    report.function = std::move(f);
    return report;
  }

  const auto alg = make_algorithm(config.algorithm, config.step, config.radius);
  report.algorithm_name = alg->name();
  AdversaryConfig adv_config{config.T, config.d,
                             config.mode == ExperimentMode::gzr ? AdversaryMode::gzr : AdversaryMode::general};
  if (config.mode == ExperimentMode::gzr && config.d < 2) throw ConfigError("gzr mode needs d >= 2");
  ResistingAdversary adversary(adv_config);
  const auto run = run_queries(*alg, [&](const Vector& x) { return adversary.answer(x); }, config.d, config.T);
  Materialized m = adversary.materialize();
  report.transcript = adversary.transcript();
  if (m.consistent) {
    report.replay_verified = replay_verify(*report.transcript, m.function, *alg);
    if (!report.replay_verified)
      throw std::logic_error(alg->name() + ": replay diverged although every germ matched; the algorithm is not deterministic");
  }
  report.run = assess(m.function, run.queries(), config.epsilon, config.delta);
  report.gzr_violation = gzr_check(m.function, report.run.trajectory);
  report.verdict = detail::adversary_verdict(report.run, m.consistent);
  report.params = std::move(m.params);
  report.function = std::move(m.function);
  return report;
}

inline Json report_summary(const ExperimentReport& r) {
  Json params = {{"step", r.config.step},     {"radius", r.config.radius}, {"samples", r.config.samples},
                 {"max_steps", r.config.max_steps}, {"T", r.config.T},        {"d", r.config.d},
                 {"epsilon", r.config.epsilon}, {"delta", r.config.delta},  {"seed", r.config.seed}};
  Json trajectory = Json::array();
  for (std::size_t t = 0; t < r.run.trajectory.size(); ++t)
    trajectory.push_back({{"t", t + 1},
                          {"x", vector_to_json(r.run.trajectory[t])},
                          {"f_value", r.run.values[t]},
                          {"gas_distance", r.run.distances[t]},
                          {"certified", static_cast<bool>(r.run.certified[t])}});
  Json out = {{"algorithm", r.algorithm_name},
              {"mode", to_string(r.config.mode)},
              {"params", std::move(params)},
              {"best_distance", r.run.best_distance},
              {"steps", r.run.step_count},
              {"replay_verified", r.replay_verified},
              {"verdict", r.verdict},
              {"trajectory", std::move(trajectory)}};
  out["gzr_violation"] = r.gzr_violation ? Json(*r.gzr_violation) : Json(nullptr);
  if (r.params)
    out["materialized"] = {{"breakpoints", r.params->breakpoints}, {"sigma", r.params->sigma}, {"eta", r.params->eta}};
  return out;
}

/// Writes trajectory.csv, summary.json and, when present, transcript.json and
/// function.json into `directory`, replacing earlier files.
inline void emit_results(const ExperimentReport& report, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + directory.string() + ": " + ec.message());
  write_text_file(directory / "trajectory.csv", trajectory_csv(report.run));
  write_text_file(directory / "summary.json", report_summary(report).dump(2) + "\n");
  if (report.transcript) write_text_file(directory / "transcript.json", transcript_to_json(*report.transcript).dump(2) + "\n");
  if (report.function) write_text_file(directory / "function.json", function_to_json(*report.function).dump(2) + "\n");
}

}  // namespace nsgas
