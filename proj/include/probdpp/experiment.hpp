// Copyright 2026 The ProbDPP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROBDPP_EXPERIMENT_HPP_
#define PROBDPP_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "probdpp/kernel.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/oracle.hpp"

namespace probdpp {

// Process exit statuses of the command-line tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitPropertyFailure = 2,
  kExitTooLarge = 3,
};

struct ExperimentConfig {
  std::size_t n_sources = 10;
  std::size_t k_select = 3;
  std::size_t dim = 8;
  double epsilon = 0.1;
  double c = 3.0;
  std::uint64_t horizon = 1000;
  std::size_t replicas = 1;
  std::uint64_t base_seed = 0;
  std::string alpha_spec = "linspace:0.3,0.9";
  // "generate" or a path to a feature CSV.
  std::string feature_source = "generate";
  std::uint64_t feature_seed = 0;
  double ridge = kDefaultRidge;
  // "greedy" or "exhaustive"; select also accepts "both".
  std::string oracle_mode = "greedy";
  // Directory receiving trace.csv and summary.json; empty writes nothing.
  std::string output_path = "results";
  std::size_t threads = 1;
  bool record_wall_time = false;

  std::size_t verify_tuples = 2000;
  std::size_t verify_instances = 20;
  std::size_t verify_samples = 20000;
  std::size_t verify_draws = 100000;

  // Keys assigned explicitly (from a file or an override).
  std::set<std::string> explicit_keys;

  // Applies one key=value assignment. Throws ConfigError naming the key.
  void set(std::string_view key, std::string_view value);
  // Throws ConfigError naming the first field out of range.
  void validate() const;
  OracleMode oracle() const;
  nlohmann::ordered_json to_json() const;
};

// Flat key=value text; '#' starts a comment, blank lines are ignored.
ExperimentConfig parse_config(std::string_view text,
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path,
                             ExperimentConfig base = {});
// "key=value" override; throws ConfigError on a missing '='.
void apply_override(ExperimentConfig& config, std::string_view assignment);

// Formats with 12 significant digits ("%.12g").
std::string format_real(double value);

struct Instance {
  GramMatrix gram;
  ReliabilityVector alphas;
};

// Features (generated or loaded), ridged Gram and reliabilities. For a
// feature file, n_sources and dim come from the file.
Instance build_instance(ExperimentConfig& config);

struct SimulationSummary {
  std::vector<std::uint64_t> checkpoints;
  // per replica, cumulative regret at each checkpoint
  std::vector<std::vector<double>> replica_regret;
  std::vector<double> regret_mean;
  std::vector<double> regret_std;
  double upper_bound_T;
  std::optional<double> lower_constant;
  double wall_time_seconds;
  nlohmann::ordered_json json;
};

// Checkpoints {T/100, T/10, T/2, T}, each clamped to at least 1.
std::vector<std::uint64_t> regret_checkpoints(std::uint64_t horizon);

// Runs config.replicas independent KL-UCB experiments with seeds
// base_seed + r on config.threads workers. When output_path is set, writes
// trace.csv and summary.json there. Output bytes do not depend on threads.
SimulationSummary cmd_simulate(ExperimentConfig config);

struct PropertyResult {
  std::string name;
  bool passed;
  nlohmann::ordered_json stats;
};

struct VerifyOptions {
  // Test-only: drops the factor 2 in the closed-form identity.
  bool corrupt_identity = false;
};

std::vector<PropertyResult> cmd_verify(const ExperimentConfig& config,
                                       const VerifyOptions& options = {});

// One-shot selection with known reliabilities; returns the JSON report.
nlohmann::ordered_json cmd_select(ExperimentConfig config);

}  // namespace probdpp

#endif  // PROBDPP_EXPERIMENT_HPP_
