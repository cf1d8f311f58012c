#pragma once

// Run configuration and residual reports for the verification CLI.
// Reports serialize to JSONL with a fixed key order so that runs with the
// same seed are byte-identical except for wall_time_ms.

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomorph/errors.hpp"

namespace geomorph {

struct CheckConfig {
  std::vector<std::string> suites{"all"};
  double tolerance = 1e-7;      // gate for closed-form residuals
  double fd_tolerance = 1e-6;   // gate for residuals limited by finite differences
  int samples = 200;            // sample points per check and bundle
  std::uint64_t seed = 0;
  int jet_order = 2;            // highest derivative order cross-checked against FD
  std::string output_path;      // empty: JSONL to stdout
  double margin = 0.05;         // admissibility margin for sampling regions
  bool summary = false;

  void validate() const {
    if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be nonnegative");
    if (!(fd_tolerance >= 0.0)) throw ConfigError("fd_tolerance must be nonnegative");
    if (samples <= 0) throw ConfigError("samples must be positive");
    if (jet_order < 1 || jet_order > 3) throw ConfigError("jet_order must be 1, 2 or 3");
    if (!(margin >= 0.0)) throw ConfigError("margin must be nonnegative");
  }
};

// Reads a JSON object whose keys mirror the CheckConfig field names.
// Unknown keys are rejected so typos do not silently fall back to defaults.
inline CheckConfig load_config(std::istream& in, CheckConfig base = {}) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "suites") {
        base.suites = value.get<std::vector<std::string>>();
      } else if (key == "tolerance") {
        base.tolerance = value.get<double>();
      } else if (key == "fd_tolerance") {
        base.fd_tolerance = value.get<double>();
      } else if (key == "samples") {
        base.samples = value.get<int>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "jet_order") {
        base.jet_order = value.get<int>();
      } else if (key == "output_path") {
        base.output_path = value.get<std::string>();
      } else if (key == "margin") {
        base.margin = value.get<double>();
      } else if (key == "summary") {
        base.summary = value.get<bool>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for config key '" + key + "': " + e.what());
    }
  }
  return base;
}

inline CheckConfig load_config_file(const std::string& path, CheckConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return load_config(in, std::move(base));
}

struct ResidualReport {
  std::string check;
  std::string bundle;
  int n_points = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> worst_point;
  bool pass = false;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

inline nlohmann::ordered_json to_json(const ResidualReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["bundle"] = r.bundle;
  j["n_points"] = r.n_points;
  j["max_residual"] = r.max_residual;
  j["mean_residual"] = r.mean_residual;
  j["worst_point"] = r.worst_point;
  j["pass"] = r.pass;
  j["seed"] = r.seed;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline void write_jsonl(std::ostream& out, const std::vector<ResidualReport>& reports) {
  for (const auto& r : reports) out << to_json(r).dump() << "\n";
}

inline bool all_pass(const std::vector<ResidualReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

inline void write_summary(std::ostream& out, const std::vector<ResidualReport>& reports) {
  int passed = 0;
  for (const auto& r : reports) passed += r.pass ? 1 : 0;
  out << "\n";
  out << std::left << std::setw(26) << "check" << std::setw(24) << "bundle" << std::right
      << std::setw(8) << "points" << std::setw(14) << "max" << std::setw(14) << "mean"
      << "  status\n";
  for (const auto& r : reports) {
    std::ostringstream maxs, means;
    maxs << std::scientific << std::setprecision(3) << r.max_residual;
    means << std::scientific << std::setprecision(3) << r.mean_residual;
    out << std::left << std::setw(26) << r.check << std::setw(24) << r.bundle << std::right
        << std::setw(8) << r.n_points << std::setw(14) << maxs.str() << std::setw(14)
        << means.str() << "  " << (r.pass ? "pass" : "FAIL") << "\n";
  }
  out << "\n"
      << passed << "/" << reports.size() << " checks passed"
      << (passed == static_cast<int>(reports.size()) ? "" : " (FAILURES PRESENT)") << "\n";
}

}  // namespace geomorph
