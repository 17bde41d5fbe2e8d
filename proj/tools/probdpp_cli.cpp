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

// Command-line front end: simulate, verify, select.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "probdpp/errors.hpp"
#include "probdpp/experiment.hpp"

namespace {

using probdpp::ExperimentConfig;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "key=value config file");
  cmd->add_option("-s,--set", args.overrides,
                  "override a config key (key=value), repeatable");
}

ExperimentConfig resolve(const CommonArgs& args,
                         const std::vector<std::string>& extra) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = probdpp::load_config(args.config_path, config);
  }
  for (const auto& o : extra) probdpp::apply_override(config, o);
  for (const auto& o : args.overrides) probdpp::apply_override(config, o);
  return config;
}

// Flag values that map straight onto config keys.
void push_if(std::vector<std::string>& out, const std::string& key,
             const std::string& value) {
  if (!value.empty()) out.push_back(key + "=" + value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-aware determinantal subset selection"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  std::string sim_threads;
  auto* simulate = app.add_subcommand(
      "simulate", "Run replicated KL-UCB experiments, write trace and summary");
  add_common(simulate, sim_args);
  simulate->add_option("--threads", sim_threads, "worker threads");

  CommonArgs verify_args;
  bool corrupt_identity = false;
  auto* verify = app.add_subcommand(
      "verify", "Check the objective properties on seeded random instances");
  add_common(verify, verify_args);
  verify->add_flag("--corrupt-identity", corrupt_identity,
                   "test-only: break the closed-form identity");

  CommonArgs select_args;
  std::string features, alphas, epsilon, k, oracle;
  auto* select = app.add_subcommand(
      "select", "One-shot selection with known reliabilities (JSON output)");
  add_common(select, select_args);
  select->add_option("--features", features, "'generate' or a feature CSV");
  select->add_option("--alphas", alphas, "reliability spec");
  select->add_option("--epsilon", epsilon, "regularizer");
  select->add_option("-k,--k", k, "subset size");
  select->add_option("--oracle", oracle, "greedy, exhaustive or both");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      std::vector<std::string> extra;
      push_if(extra, "threads", sim_threads);
      ExperimentConfig config = resolve(sim_args, extra);
      const auto summary = probdpp::cmd_simulate(config);
      std::cout << summary.json.dump(2) << '\n';
      return probdpp::kExitOk;
    }
    if (verify->parsed()) {
      ExperimentConfig config = resolve(verify_args, {});
      probdpp::VerifyOptions options;
      options.corrupt_identity = corrupt_identity;
      bool all = true;
      for (const auto& r : probdpp::cmd_verify(config, options)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ' '
                  << r.stats.dump() << '\n';
        all = all && r.passed;
      }
      return all ? probdpp::kExitOk : probdpp::kExitPropertyFailure;
    }
    if (select->parsed()) {
      std::vector<std::string> extra;
      push_if(extra, "feature_source", features);
      push_if(extra, "alpha_spec", alphas);
      push_if(extra, "epsilon", epsilon);
      push_if(extra, "k_select", k);
      push_if(extra, "oracle_mode", oracle);
      ExperimentConfig config = resolve(select_args, extra);
      std::cout << probdpp::cmd_select(config).dump(2) << '\n';
      return probdpp::kExitOk;
    }
  } catch (const probdpp::TooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return probdpp::kExitTooLarge;
  } catch (const probdpp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return probdpp::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return probdpp::kExitValidation;
  }
  return probdpp::kExitOk;
}
