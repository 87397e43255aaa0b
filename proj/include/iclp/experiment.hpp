// Copyright 2026 The ICLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON-configured experiment runs. Requires nlohmann/json (json.hpp).

#ifndef ICLP_EXPERIMENT_HPP_
#define ICLP_EXPERIMENT_HPP_

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iclp/bench.hpp"
#include "iclp/error.hpp"
#include "json.hpp"

namespace iclp {

namespace internal {

inline void RejectUnknownKeys(const nlohmann::json& j,
                              const std::set<std::string>& known) {
  ICLP_REQUIRE(j.is_object(), ConfigError, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    ICLP_REQUIRE(known.count(it.key()), ConfigError, "unknown config key '",
                 it.key(), "'");
  }
}

template <typename T>
T Get(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <typename T>
std::vector<T> GetList(const nlohmann::json& j, const std::string& key,
                       std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace internal

inline MeanBenchConfig ParseMeanBenchConfig(const nlohmann::json& j) {
  internal::RejectUnknownKeys(
      j, {"kind", "scenario", "strategies", "strategy", "n", "eps",
          "replicates", "seed", "tau", "delta", "grid_points", "kernel", "rho",
          "floor_rel", "error", "error_rho", "error_scale", "t5_terms",
          "s4_seed", "ar_psi_grid", "record_seconds"});
  MeanBenchConfig c;
  using internal::Get;
  using internal::GetList;
  c.scenario = ParseScenario(Get<std::string>(j, "scenario", "S1"));
  std::vector<std::string> strategies = GetList<std::string>(
      j, j.contains("strategies") ? "strategies" : "strategy", {"iclp-qr"});
  c.strategies.clear();
  for (const auto& s : strategies) c.strategies.push_back(ParseStrategy(s));
  c.ns = GetList<int>(j, "n", c.ns);
  c.eps = GetList<double>(j, "eps", c.eps);
  c.replicates = Get<int>(j, "replicates", c.replicates);
  ICLP_REQUIRE(j.contains("seed"), ConfigError, "config key 'seed' is required");
  c.seed = Get<std::uint64_t>(j, "seed", 0);
  ICLP_REQUIRE(j.contains("tau"), ConfigError,
               "config key 'tau' is required (declare the curve norm bound)");
  c.tau = Get<double>(j, "tau", c.tau);
  c.delta = Get<double>(j, "delta", c.delta);
  c.grid_points = Get<int>(j, "grid_points", c.grid_points);
  c.kernel = Get<std::string>(j, "kernel", c.kernel);
  c.rho = Get<double>(j, "rho", c.rho);
  c.floor_rel = Get<double>(j, "floor_rel", c.floor_rel);
  c.error.error = ParseErrorKind(Get<std::string>(j, "error", "gp_rbf"));
  c.error.error_rho = Get<double>(j, "error_rho", c.error.error_rho);
  if (j.contains("error_scale")) c.error.error_scale = Get<double>(j, "error_scale", 0.5);
  c.error.t5_terms = Get<int>(j, "t5_terms", c.error.t5_terms);
  c.error.s4_seed = Get<std::uint64_t>(j, "s4_seed", c.error.s4_seed);
  c.ar_psi_grid = GetList<double>(j, "ar_psi_grid", {});
  c.record_seconds = Get<bool>(j, "record_seconds", false);
  ICLP_REQUIRE(!c.ns.empty() && !c.eps.empty() && !c.strategies.empty(),
               ConfigError, "n, eps and strategies must be non-empty");
  for (double e : c.eps) PrivacyBudget{e, 0.0}.Validate();
  ICLP_REQUIRE(c.tau > 0, ConfigError, "tau must be positive");
  return c;
}

inline KdeBenchConfig ParseKdeBenchConfig(const nlohmann::json& j) {
  internal::RejectUnknownKeys(
      j, {"kind", "setting", "n", "eps", "replicates", "seed", "grid_points",
          "kernel", "rho", "eta", "floor_rel", "bandwidth_scale",
          "record_seconds"});
  KdeBenchConfig c;
  using internal::Get;
  using internal::GetList;
  const std::string setting = Get<std::string>(j, "setting", "1d");
  ICLP_REQUIRE(setting == "1d" || setting == "2d", ConfigError,
               "setting must be '1d' or '2d'");
  c.setting = setting == "1d" ? MixtureSetting::k1D : MixtureSetting::k2D;
  if (c.setting == MixtureSetting::k2D) {
    c.grid_points = 50;
    c.kernel = "exponential";
    c.rho = 1.0;
  }
  c.ns = GetList<int>(j, "n", c.ns);
  c.eps = GetList<double>(j, "eps", c.eps);
  c.replicates = Get<int>(j, "replicates", c.replicates);
  ICLP_REQUIRE(j.contains("seed"), ConfigError, "config key 'seed' is required");
  c.seed = Get<std::uint64_t>(j, "seed", 0);
  c.grid_points = Get<int>(j, "grid_points", c.grid_points);
  c.kernel = Get<std::string>(j, "kernel", c.kernel);
  c.rho = Get<double>(j, "rho", c.rho);
  c.eta = Get<double>(j, "eta", c.eta);
  c.floor_rel = Get<double>(j, "floor_rel", c.floor_rel);
  c.bandwidth_scale = Get<double>(j, "bandwidth_scale", c.bandwidth_scale);
  c.record_seconds = Get<bool>(j, "record_seconds", false);
  for (double e : c.eps) PrivacyBudget{e, 0.0}.Validate();
  return c;
}

inline nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  ICLP_REQUIRE(in.good(), ConfigError, "cannot open config '", path, "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

// Runs a mean ("kind": "mean", default) or density ("kind": "kde")
// experiment and returns its CSV report.
inline std::string run_experiment(const nlohmann::json& config) {
  const std::string kind = internal::Get<std::string>(config, "kind", "mean");
  std::ostringstream out;
  if (kind == "mean") {
    WriteBenchCsv(out, RunMeanBench(ParseMeanBenchConfig(config)));
  } else if (kind == "kde") {
    const KdeBenchConfig c = ParseKdeBenchConfig(config);
    WriteBenchCsv(out, KdeRows(c, RunKdeBench(c)));
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  return out.str();
}

inline std::string run_experiment(const std::string& config_path) {
  return run_experiment(ReadJsonFile(config_path));
}

}  // namespace iclp

#endif  // ICLP_EXPERIMENT_HPP_
