#pragma once

#include <nsgas/algorithms.hpp>
#include <nsgas/oracle.hpp>
#include <nsgas/pa_core.hpp>
#include <nsgas/subdiff.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nsgas {

using Json = nlohmann::json;

inline Json vector_to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

inline Json function_to_json(const MaxMinFunction& f) {
  Json terms = Json::array();
  for (const auto& term : f.terms()) {
    Json atoms = Json::array();
    for (const auto& atom : term) atoms.push_back({{"gradient", vector_to_json(atom.gradient)}, {"offset", atom.offset}});
    terms.push_back(std::move(atoms));
  }
  return {{"dimension", f.dimension()}, {"terms", std::move(terms)}};
}

inline MaxMinFunction function_from_json(const Json& j) {
  const Index d = j.at("dimension").get<Index>();
  std::vector<MinTerm> terms;
  for (const auto& term : j.at("terms")) {
    MinTerm atoms;
    for (const auto& atom : term) atoms.push_back({vector_from_json(atom.at("gradient")), atom.at("offset").get<double>()});
    terms.push_back(std::move(atoms));
  }
  return MaxMinFunction(d, std::move(terms));
}

/// Algorithm-facing transcript log; hidden radii are never written.
inline Json transcript_to_json(const Transcript& tr) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    entries.push_back({{"t", i + 1},
                       {"query", vector_to_json(tr.queries[i])},
                       {"germ", function_to_json(tr.germs[i].local_function)},
                       {"value", tr.germs[i].value}});
  }
  return {{"phase", tr.phase == TranscriptPhase::collecting ? "collecting" : "materialized"}, {"entries", std::move(entries)}};
}

inline Transcript transcript_from_json(const Json& j) {
  Transcript tr;
  for (const auto& e : j.at("entries")) {
    tr.queries.push_back(vector_from_json(e.at("query")));
    tr.germs.push_back({function_from_json(e.at("germ")), e.at("value").get<double>()});
  }
  tr.phase = j.value("phase", "collecting") == "materialized" ? TranscriptPhase::materialized : TranscriptPhase::collecting;
  return tr;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

inline Json certificate_to_json(const StationarityCertificate& cert) {
  return Json{{"epsilon", cert.epsilon},
              {"delta", cert.delta},
              {"distance", cert.distance},
              {"weights", vector_to_json(cert.weights)},
              {"verdict", cert.verdict()}};
}

/// Trajectory rows t,x1,x2,x3,f_value,gas_distance,certified with 17
/// significant digits; coordinates beyond the dimension are left blank.
inline std::string trajectory_csv(const RunResult& run) {
  std::string out = "t,x1,x2,x3,f_value,gas_distance,certified\n";
  for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
    const Vector& x = run.trajectory[t];
    out += fmt::format("{}", t + 1);
    for (Index i = 0; i < 3; ++i) out += i < x.size() ? fmt::format(",{:.17g}", x(i)) : std::string(",");
    out += fmt::format(",{:.17g},{:.17g},{}\n", run.values[t], run.distances[t], run.certified[t] ? 1 : 0);
  }
  return out;
}

}  // namespace nsgas
