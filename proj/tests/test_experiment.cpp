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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "probdpp/errors.hpp"
#include "probdpp/experiment.hpp"

namespace probdpp {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("probdpp_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c = parse_config(
      "# small run\n"
      "n_sources = 6\n"
      "k_select=2\n"
      "dim=4\n"
      "horizon=300\n"
      "replicas=3\n"
      "base_seed=11\n"
      "alpha_spec=linspace:0.2,0.9\n");
  c.output_path = out.string();
  return c;
}

TEST_CASE("config parsing and validation") {
  ExperimentConfig c = parse_config("epsilon=0.5\n\n  c = 1.5  # comment\n");
  CHECK(c.epsilon == 0.5);
  CHECK(c.c == 1.5);
  CHECK(c.explicit_keys.count("epsilon"));
  apply_override(c, "horizon=42");
  CHECK(c.horizon == 42);

  auto field_of = [](auto&& fn) -> std::string {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of([] { parse_config("nope=1"); }) == "nope");
  CHECK(field_of([] { parse_config("horizon=abc"); }) == "horizon");
  CHECK(field_of([] { parse_config("epsilon"); }) == "line 1");
  CHECK(field_of([] {
          ExperimentConfig c;
          apply_override(c, "horizon");
        }) == "horizon");
  CHECK(field_of([] { parse_config("k_select=20\nn_sources=5").validate(); }) ==
        "k_select");
  CHECK(field_of([] { parse_config("epsilon=0").validate(); }) == "epsilon");
  CHECK(field_of([] { parse_config("horizon=0").validate(); }) == "horizon");
  CHECK(field_of([] { parse_config("replicas=0").validate(); }) == "replicas");
  CHECK(field_of([] { parse_config("oracle_mode=random").validate(); }) ==
        "oracle_mode");
  CHECK(field_of([] {
          ExperimentConfig c = parse_config("alpha_spec=0.5,0.5");
          build_instance(c);
        }) == "alpha_spec");
  CHECK(field_of([] {
          ExperimentConfig c = parse_config("feature_source=/nonexistent.csv");
          build_instance(c);
        }) == "feature_source");
}

TEST_CASE("format_real uses 12 significant digits") {
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(format_real(-123456.7890123456) == "-123456.789012");
}

TEST_CASE("regret checkpoints") {
  CHECK(regret_checkpoints(100000) == std::vector<std::uint64_t>{1000, 10000, 50000, 100000});
  CHECK(regret_checkpoints(1) == std::vector<std::uint64_t>{1, 1, 1, 1});
}

TEST_CASE("cmd_simulate output contract") {
  const fs::path out = scratch("contract");
  const auto summary = cmd_simulate(small_config(out));
  const std::string csv = slurp(out / "trace.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "replica,t,selected,mask,instant_regret,cum_regret");
  std::size_t rows = 0;
  std::size_t expect_replica = 0, expect_t = 1;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string replica, t, selected, mask;
    std::getline(fields, replica, ',');
    std::getline(fields, t, ',');
    std::getline(fields, selected, ',');
    std::getline(fields, mask, ',');
    CHECK(std::stoul(replica) == expect_replica);
    CHECK(std::stoul(t) == expect_t);
    CHECK(std::count(selected.begin(), selected.end(), ';') == 1);
    CHECK(mask.size() == 3);
    if (++expect_t > 300) {
      expect_t = 1;
      ++expect_replica;
    }
  }
  CHECK(rows == 3 * 300);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK_FALSE(fs::exists(out / "trace.csv.part0"));

  const auto json = nlohmann::json::parse(slurp(out / "summary.json"));
  for (const char* key : {"config", "checkpoints", "regret_mean", "regret_std",
                          "upper_bound_T", "lower_constant",
                          "wall_time_seconds"}) {
    CHECK(json.contains(key));
  }
  CHECK(json["checkpoints"] == nlohmann::json::array({3, 30, 150, 300}));
  CHECK(json["lower_constant"].is_null());
  CHECK(json["upper_bound_T"].get<double>() > 0.0);
  for (const auto& rr : summary.replica_regret) {
    for (std::size_t c = 1; c < rr.size(); ++c) CHECK(rr[c] >= rr[c - 1]);
  }
}

TEST_CASE("cmd_simulate is byte-identical across runs and thread counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ExperimentConfig ca = small_config(a);
  ExperimentConfig cb = small_config(b);
  ca.threads = 1;
  cb.threads = 4;
  cb.output_path = b.string();
  cmd_simulate(ca);
  cmd_simulate(cb);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  cmd_simulate(ca);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("cmd_simulate with T = 1 and K = 1") {
  const fs::path out = scratch("t1");
  ExperimentConfig c = small_config(out);
  c.horizon = 1;
  c.k_select = 1;
  c.replicas = 2;
  const auto summary = cmd_simulate(c);
  const std::string csv = slurp(out / "trace.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\n0,1,") != std::string::npos);
  CHECK(csv.find("\n1,1,") != std::string::npos);
  CHECK(summary.lower_constant.has_value());
}

TEST_CASE("cmd_simulate guard") {
  ExperimentConfig c = parse_config("n_sources=60\nk_select=10\nhorizon=1");
  c.output_path.clear();
  CHECK_THROWS_AS(cmd_simulate(c), TooLarge);
}

TEST_CASE("cmd_verify passes by default and catches a broken identity") {
  ExperimentConfig c;
  c.verify_tuples = 300;
  c.verify_instances = 10;
  c.verify_samples = 5000;
  c.verify_draws = 20000;
  const auto ok = cmd_verify(c);
  REQUIRE(ok.size() == 5);
  for (const auto& r : ok) {
    INFO(r.name << " " << r.stats.dump());
    CHECK(r.passed);
  }
  const auto& freq = ok[3];
  CHECK(freq.name == "naive_singularity_frequency");
  CHECK(freq.stats.contains("frequency"));
  CHECK(freq.stats["ci_3sigma"].size() == 2);

  VerifyOptions corrupt;
  corrupt.corrupt_identity = true;
  const auto bad = cmd_verify(c, corrupt);
  CHECK(bad[0].name == "per_sample_identity");
  CHECK_FALSE(bad[0].passed);
}

TEST_CASE("cmd_select") {
  const fs::path dir = scratch("select");
  fs::create_directories(dir);
  const fs::path csv = dir / "eye.csv";
  std::ofstream(csv, std::ios::binary) << "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n";

  ExperimentConfig c;
  c.feature_source = csv.string();
  c.alpha_spec = "linspace:0.2,0.8";
  c.k_select = 2;
  const auto out = cmd_select(c);
  CHECK(out["n_sources"] == 4);
  CHECK(out["results"][0]["selected"] == nlohmann::json::array({2, 3}));

  c.k_select = 4;
  CHECK(cmd_select(c)["results"][0]["selected"] ==
        nlohmann::json::array({0, 1, 2, 3}));

  ExperimentConfig both;
  both.n_sources = 8;
  both.k_select = 3;
  both.alpha_spec = "uniform:0,1:5";
  both.oracle_mode = "both";
  const auto r = cmd_select(both)["results"];
  REQUIRE(r.size() == 2);
  CHECK(r[0]["oracle"] == "greedy");
  CHECK(r[1]["oracle"] == "exhaustive");
  CHECK(r[1]["objective"].get<double>() >= r[0]["objective"].get<double>());
  const double sum =
      r[1]["g_term"].get<double>() + r[1]["reliability_term"].get<double>();
  CHECK(r[1]["objective"].get<double>() == doctest::Approx(sum));

  ExperimentConfig mismatch = c;
  mismatch.set("n_sources", "5");
  CHECK_THROWS_AS(cmd_select(mismatch), ConfigError);
}

}  // namespace
}  // namespace probdpp
