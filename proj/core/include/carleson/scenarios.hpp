#pragma once
// Reproduction scenarios: named, parameter-validated pipelines that build a
// tree, build a measure, evaluate conditions/norms/oracles, and grade the
// results against tolerances declared here in code. Each run yields a
// RunReport whose verdicts reference only numbers stored in the report, and
// which serializes bit-identically for identical (name, params, seed).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace carleson {

struct Verdict {
  std::string check;
  std::string relation;  // "<=", ">=", "==", "band", "bool"
  double value = 0.0;    // the measured number
  double bound = 0.0;    // the declared tolerance / threshold
  bool pass = false;
};

struct RunReport {
  std::string scenario;
  nlohmann::json params;  // resolved parameters (defaults filled in)
  std::uint64_t seed = 0;
  nlohmann::json steps = nlohmann::json::array();  // [{name, ...numbers}]
  std::vector<Verdict> verdicts;
  bool pass = true;
  std::vector<std::string> table_columns;  // per-depth / per-instance table
  std::vector<std::vector<double>> table;
  double wall_ms = 0.0;
};

std::vector<std::string> scenario_names();

// Validates `params` against the scenario's schema (unknown key or wrong
// type -> std::invalid_argument naming the field), runs the pipeline, and
// grades verdicts. `max_nodes` caps tree construction: scenarios estimate
// node counts first and throw std::length_error instead of building bigger.
RunReport run_scenario(const std::string& name, const nlohmann::json& params,
                       std::uint64_t seed,
                       std::int64_t max_nodes = 2'000'000);

// Full report; every floating number rounded to 12 significant digits.
nlohmann::json run_report_to_json(const RunReport& r);
RunReport run_report_from_json(const nlohmann::json& j);

// The same JSON minus wall-clock, dumped; equal strings <=> equal runs.
std::string run_report_canonical(const RunReport& r);

// The per-depth table: header line plus one line per row.
std::string run_report_csv(const RunReport& r);

struct RunDiff {
  bool pass = true;
  std::vector<std::string> lines;  // "path: a vs b (rel err ...)"
};

// Field-wise comparison of two serialized reports. Numbers compare
// relatively against `rel_tol`, everything else exactly; wall-clock is
// ignored. Missing/extra fields are differences.
RunDiff compare_runs(const nlohmann::json& a, const nlohmann::json& b,
                     double rel_tol);

}  // namespace carleson
