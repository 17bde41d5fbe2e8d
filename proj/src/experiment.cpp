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

#include "probdpp/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "probdpp/analysis.hpp"
#include "probdpp/bandit.hpp"
#include "probdpp/environment.hpp"
#include "probdpp/errors.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/random.hpp"

namespace probdpp {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" +
                                            std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  if (!value.empty() && value.front() == '+') value.remove_prefix(1);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() ||
      ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key),
                      "expected a real number, got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key), "expected true or false");
}

// Reals go through the 12-digit text form so the emitted JSON is stable.
ordered_json json_real(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::stod(format_real(value));
}

std::string join_items(std::span<const std::size_t> items) {
  std::string out;
  for (std::size_t a = 0; a < items.size(); ++a) {
    if (a) out += ';';
    out += std::to_string(items[a]);
  }
  return out;
}

std::string join_bits(const DropoutMask& mask) {
  std::string out;
  for (std::size_t a = 0; a < mask.size(); ++a) {
    if (a) out += ';';
    out += mask[a] ? '1' : '0';
  }
  return out;
}

// Runs fn(r) for r in [0, count) on up to `threads` workers and rethrows the
// first failure by replica index.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        fn(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void ExperimentConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);
  if (key == "n_sources") {
    n_sources = parse_unsigned<std::size_t>(key, value);
  } else if (key == "k_select") {
    k_select = parse_unsigned<std::size_t>(key, value);
  } else if (key == "dim") {
    dim = parse_unsigned<std::size_t>(key, value);
  } else if (key == "epsilon") {
    epsilon = parse_double(key, value);
  } else if (key == "c") {
    c = parse_double(key, value);
  } else if (key == "horizon") {
    horizon = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "replicas") {
    replicas = parse_unsigned<std::size_t>(key, value);
  } else if (key == "base_seed") {
    base_seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "alpha_spec") {
    alpha_spec = std::string(value);
  } else if (key == "feature_source") {
    feature_source = std::string(value);
  } else if (key == "feature_seed") {
    feature_seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "ridge") {
    ridge = parse_double(key, value);
  } else if (key == "oracle_mode") {
    oracle_mode = std::string(value);
  } else if (key == "output_path") {
    output_path = std::string(value);
  } else if (key == "threads") {
    threads = parse_unsigned<std::size_t>(key, value);
  } else if (key == "record_wall_time") {
    record_wall_time = parse_bool(key, value);
  } else if (key == "verify_tuples") {
    verify_tuples = parse_unsigned<std::size_t>(key, value);
  } else if (key == "verify_instances") {
    verify_instances = parse_unsigned<std::size_t>(key, value);
  } else if (key == "verify_samples") {
    verify_samples = parse_unsigned<std::size_t>(key, value);
  } else if (key == "verify_draws") {
    verify_draws = parse_unsigned<std::size_t>(key, value);
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
  explicit_keys.insert(key);
}

void ExperimentConfig::validate() const {
  if (n_sources < 1) throw ConfigError("n_sources", "must be >= 1");
  if (k_select < 1 || k_select > n_sources) {
    throw ConfigError("k_select", "must satisfy 1 <= k_select <= n_sources");
  }
  if (dim < 1) throw ConfigError("dim", "must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
  if (!(c >= 0.0)) throw ConfigError("c", "must be >= 0");
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (replicas < 1) throw ConfigError("replicas", "must be >= 1");
  if (!(ridge > 0.0)) throw ConfigError("ridge", "must be > 0");
  if (oracle_mode != "greedy" && oracle_mode != "exhaustive" &&
      oracle_mode != "both") {
    throw ConfigError("oracle_mode", "must be greedy, exhaustive or both");
  }
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (feature_source.empty()) {
    throw ConfigError("feature_source", "must be 'generate' or a file path");
  }
  if (verify_tuples < 1) throw ConfigError("verify_tuples", "must be >= 1");
  if (verify_instances < 1) {
    throw ConfigError("verify_instances", "must be >= 1");
  }
  if (verify_samples < 2) throw ConfigError("verify_samples", "must be >= 2");
  if (verify_draws < 1) throw ConfigError("verify_draws", "must be >= 1");
}

OracleMode ExperimentConfig::oracle() const {
  if (oracle_mode == "exhaustive") return OracleMode::kExhaustive;
  if (oracle_mode == "greedy") return OracleMode::kGreedy;
  throw ConfigError("oracle_mode", "bandit runs need greedy or exhaustive");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["n_sources"] = n_sources;
  j["k_select"] = k_select;
  j["dim"] = dim;
  j["epsilon"] = json_real(epsilon);
  j["c"] = json_real(c);
  j["horizon"] = horizon;
  j["replicas"] = replicas;
  j["base_seed"] = base_seed;
  j["alpha_spec"] = alpha_spec;
  j["feature_source"] = feature_source;
  j["feature_seed"] = feature_seed;
  j["ridge"] = json_real(ridge);
  j["oracle_mode"] = oracle_mode;
  return j;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected key=value");
    }
    base.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), "override must be key=value");
  }
  config.set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

Instance build_instance(ExperimentConfig& config) {
  std::optional<FeatureMatrix> features;
  if (config.feature_source == "generate") {
    config.validate();
    features = generate_features(config.n_sources, config.dim,
                                 config.feature_seed);
  } else {
    try {
      features = load_features(config.feature_source);
    } catch (const Error& e) {
      throw ConfigError("feature_source", e.what());
    }
    if (config.explicit_keys.count("n_sources") &&
        config.n_sources != features->rows()) {
      throw ConfigError("n_sources", "does not match the feature file rows");
    }
    config.n_sources = features->rows();
    config.dim = features->dim();
    config.validate();
  }
  GramMatrix gram = ridge(build_gram(*features), config.ridge);
  try {
    return {std::move(gram), alpha_spec_parse(config.alpha_spec,
                                              config.n_sources)};
  } catch (const Error& e) {
    throw ConfigError("alpha_spec", e.what());
  }
}

std::vector<std::uint64_t> regret_checkpoints(std::uint64_t horizon) {
  auto clamp = [](std::uint64_t t) { return std::max<std::uint64_t>(1, t); };
  return {clamp(horizon / 100), clamp(horizon / 10), clamp(horizon / 2),
          horizon};
}

SimulationSummary cmd_simulate(ExperimentConfig config) {
  const auto start = std::chrono::steady_clock::now();
  Instance instance = build_instance(config);
  KLUCBConfig cfg;
  cfg.c = config.c;
  cfg.epsilon = config.epsilon;
  cfg.k = config.k_select;
  cfg.oracle = config.oracle();
  cfg.validate(config.n_sources);

  const TrueObjective objective(instance.gram, instance.alphas, config.epsilon,
                                config.k_select);
  const InstanceBounds bounds =
      instance_bounds(objective, instance.alphas, config.epsilon);

  SimulationSummary summary;
  summary.checkpoints = regret_checkpoints(config.horizon);
  summary.replica_regret.assign(config.replicas,
                                std::vector<double>(summary.checkpoints.size()));

  const bool write = !config.output_path.empty();
  const fs::path dir(config.output_path);
  if (write) fs::create_directories(dir);
  auto part_path = [&](std::size_t r) {
    return dir / ("trace.csv.part" + std::to_string(r));
  };

  parallel_for(config.replicas, config.threads, [&](std::size_t r) {
    SourceModel env(instance.alphas, config.base_seed + r);
    BanditRunner runner(instance.gram, cfg);
    const FeedbackFn feedback = [&env](const SelectionAction& a) {
      return env.sample_feedback(a);
    };
    std::ofstream part;
    if (write) {
      part.open(part_path(r), std::ios::binary | std::ios::trunc);
      if (!part) throw ConfigError("output_path", "cannot write trace part");
    }
    const std::string replica = std::to_string(r);
    double cumulative = 0.0;
    std::size_t next_checkpoint = 0;
    std::string row;
    for (std::uint64_t t = 1; t <= config.horizon; ++t) {
      const RoundOutcome out = runner.step(feedback);
      const double instant = objective.gap(out.action);
      cumulative += instant;
      while (next_checkpoint < summary.checkpoints.size() &&
             summary.checkpoints[next_checkpoint] == t) {
        summary.replica_regret[r][next_checkpoint++] = cumulative;
      }
      if (write) {
        row.clear();
        row += replica;
        row += ',';
        row += std::to_string(t);
        row += ',';
        row += join_items(out.action.items());
        row += ',';
        row += join_bits(out.observed);
        row += ',';
        row += format_real(instant);
        row += ',';
        row += format_real(cumulative);
        row += '\n';
        part << row;
      }
    }
  });

  for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
    RunningStats stats;
    for (const auto& rr : summary.replica_regret) stats.add(rr[c]);
    summary.regret_mean.push_back(stats.mean());
    summary.regret_std.push_back(std::sqrt(stats.variance()));
  }
  summary.upper_bound_T = theorem_upper_bound(bounds, config.c, config.horizon);
  summary.lower_constant = bounds.lower_constant;
  summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ordered_json& j = summary.json;
  j["config"] = config.to_json();
  j["checkpoints"] = summary.checkpoints;
  j["regret_mean"] = ordered_json::array();
  j["regret_std"] = ordered_json::array();
  for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
    j["regret_mean"].push_back(json_real(summary.regret_mean[c]));
    j["regret_std"].push_back(json_real(summary.regret_std[c]));
  }
  j["upper_bound_T"] = json_real(summary.upper_bound_T);
  j["lower_constant"] = summary.lower_constant
                            ? json_real(*summary.lower_constant)
                            : ordered_json(nullptr);
  j["wall_time_seconds"] = config.record_wall_time
                               ? json_real(summary.wall_time_seconds)
                               : ordered_json(nullptr);

  if (write) {
    {
      std::ofstream csv(dir / "trace.csv", std::ios::binary | std::ios::trunc);
      csv << "replica,t,selected,mask,instant_regret,cum_regret\n";
      for (std::size_t r = 0; r < config.replicas; ++r) {
        std::ifstream part(part_path(r), std::ios::binary);
        csv << part.rdbuf();
        part.close();
        fs::remove(part_path(r));
      }
      if (!csv) throw ConfigError("output_path", "failed writing trace.csv");
    }
    std::ofstream js(dir / "summary.json", std::ios::binary | std::ios::trunc);
    js << j.dump(2) << '\n';
    if (!js) throw ConfigError("output_path", "failed writing summary.json");
  }
  return summary;
}

namespace {

struct RandomInstance {
  GramMatrix gram;
  SelectionAction subset;
};

RandomInstance random_instance(Engine& engine, std::size_t max_n,
                               std::size_t max_k) {
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine() % (hi - lo + 1));
  };
  const std::size_t n = uniform_int(1, max_n);
  const std::size_t k = uniform_int(1, std::min(max_k, n));
  const std::size_t d = uniform_int(1, max_n);
  GramMatrix gram =
      ridge(build_gram(generate_features(n, d, engine())), kDefaultRidge);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(perm[i], perm[uniform_int(i, n - 1)]);
  }
  perm.resize(k);
  return {std::move(gram), SelectionAction(n, std::move(perm))};
}

// Three unit vectors with pairwise inner product 0.5.
GramMatrix correlated_triple() {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 4);
  const double shared = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < 3; ++i) {
    f(i, 0) = shared;
    f(i, i + 1) = shared;
  }
  return ridge(build_gram(FeatureMatrix::normalized(f)), kDefaultRidge);
}

}  // namespace

std::vector<PropertyResult> cmd_verify(const ExperimentConfig& config,
                                       const VerifyOptions& options) {
  config.validate();
  std::vector<PropertyResult> results;
  const double eps_grid[] = {1e-3, 0.1, 1.0};

  {  // Per-sample identity: dense log-det versus the closed form.
    Engine engine(derive_seed(config.base_seed, 1));
    double worst = 0.0;
    std::size_t failures = 0;
    for (std::size_t s = 0; s < config.verify_tuples; ++s) {
      RandomInstance inst = random_instance(engine, 12, 6);
      const Regularizer reg(eps_grid[engine() % 3]);
      std::vector<std::uint8_t> bits(inst.subset.budget());
      for (auto& b : bits) b = static_cast<std::uint8_t>(engine() & 1);
      const DropoutMask mask(bits);
      const double dense =
          regularized_masked_logdet(inst.gram, inst.subset, mask, reg);
      double closed = masked_logdet_identity(inst.gram, inst.subset, mask, reg);
      if (options.corrupt_identity) {
        closed = log_det_subset(inst.gram, inst.subset);
        for (std::size_t a = 0; a < mask.size(); ++a) {
          closed += std::log((mask[a] ? 1.0 : 0.0) + reg.epsilon());
        }
      }
      const double scaled = std::abs(dense - closed) / (1.0 + std::abs(closed));
      worst = std::max(worst, scaled);
      if (!(scaled <= 1e-8)) ++failures;
    }
    results.push_back({"per_sample_identity", failures == 0,
                       {{"tuples", config.verify_tuples},
                        {"failures", failures},
                        {"max_scaled_residual", json_real(worst)},
                        {"tolerance", 1e-8}}});
  }

  {  // Closed-form residual is exactly the geometric term.
    Engine engine(derive_seed(config.base_seed, 2));
    double worst = 0.0;
    for (std::size_t s = 0; s < config.verify_instances; ++s) {
      RandomInstance inst = random_instance(engine, 12, 6);
      std::vector<double> a(inst.gram.size());
      for (auto& x : a) x = uniform01(engine);
      const ReliabilityVector alphas(a);
      const double eps = eps_grid[engine() % 3];
      double residual =
          expected_diversity(inst.gram, inst.subset, alphas, Regularizer(eps));
      for (std::size_t i : inst.subset.items()) {
        residual -= reliability_reward(alphas[i], eps);
      }
      worst = std::max(
          worst, std::abs(residual - log_det_subset(inst.gram, inst.subset)));
    }
    results.push_back({"decomposition_residual", worst <= 1e-12,
                       {{"instances", config.verify_instances},
                        {"max_abs_residual", json_real(worst)}}});
  }

  {  // Monte Carlo mean against the closed form.
    Engine engine(derive_seed(config.base_seed, 3));
    std::size_t outside = 0;
    double worst_z = 0.0;
    for (std::size_t s = 0; s < config.verify_instances; ++s) {
      RandomInstance inst = random_instance(engine, 12, 6);
      std::vector<double> a(inst.gram.size());
      for (auto& x : a) x = uniform01(engine);
      const ReliabilityVector alphas(a);
      const Regularizer reg(eps_grid[engine() % 3]);
      const double exact =
          expected_diversity(inst.gram, inst.subset, alphas, reg);
      const MonteCarloEstimate mc = monte_carlo_diversity(
          inst.gram, inst.subset, alphas, reg, config.verify_samples, engine());
      const double dev = std::abs(mc.mean - exact);
      const double z = mc.std_error > 0.0 ? dev / mc.std_error
                                          : (dev <= 1e-9 ? 0.0 : HUGE_VAL);
      worst_z = std::max(worst_z, z);
      if (z > 3.0) ++outside;
    }
    const std::size_t allowed =
        (config.verify_instances * 2 + 99) / 100;  // 2% at 3 sigma
    results.push_back({"monte_carlo_consistency", outside <= allowed,
                       {{"instances", config.verify_instances},
                        {"samples", config.verify_samples},
                        {"outside_3se", outside},
                        {"allowed", allowed},
                        {"max_z", json_real(worst_z)}}});
  }

  const GramMatrix triple = correlated_triple();
  const SelectionAction all3(3, {0, 1, 2});
  const ReliabilityVector triple_alphas({0.9, 0.9, 0.5});

  {  // The unregularized masked kernel is singular at rate 1 - prod(alpha).
    Engine engine(derive_seed(config.base_seed, 4));
    std::size_t singular = 0;
    std::vector<std::uint8_t> bits(3);
    for (std::size_t s = 0; s < config.verify_draws; ++s) {
      for (std::size_t a = 0; a < 3; ++a) {
        bits[a] = bernoulli(engine, triple_alphas[a]) ? 1 : 0;
      }
      if (masked_logdet_naive(triple, all3, DropoutMask(bits))
              .is_neg_infinity()) {
        ++singular;
      }
    }
    const double m = static_cast<double>(config.verify_draws);
    const double expected = 1.0 - 0.9 * 0.9 * 0.5;
    const double freq = static_cast<double>(singular) / m;
    const double sigma = std::sqrt(expected * (1.0 - expected) / m);
    const double half = 3.0 * std::sqrt(freq * (1.0 - freq) / m);
    results.push_back(
        {"naive_singularity_frequency",
         std::abs(freq - expected) <= 3.0 * sigma,
         {{"draws", config.verify_draws},
          {"frequency", json_real(freq)},
          {"expected", json_real(expected)},
          {"ci_3sigma", {json_real(freq - half), json_real(freq + half)}}}});
  }

  {  // Expected diversity collapses as eps -> 0 when some alpha < 1.
    std::vector<double> values;
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      values.push_back(
          expected_diversity(triple, all3, triple_alphas, Regularizer(eps)));
    }
    const bool decreasing = values[0] > values[1] && values[1] > values[2];
    ordered_json v = ordered_json::array();
    for (double x : values) v.push_back(json_real(x));
    results.push_back({"epsilon_collapse", decreasing,
                       {{"epsilons", {1e-1, 1e-3, 1e-6}}, {"values", v}}});
  }
  return results;
}

nlohmann::ordered_json cmd_select(ExperimentConfig config) {
  Instance instance = build_instance(config);
  std::vector<double> thetas(config.n_sources);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    thetas[i] = reliability_reward(instance.alphas[i], config.epsilon);
  }
  const LinearCoefficients coeffs(thetas);

  std::vector<std::string> modes;
  if (config.oracle_mode == "both") {
    modes = {"greedy", "exhaustive"};
  } else {
    modes = {config.oracle_mode};
  }
  ordered_json out;
  out["n_sources"] = config.n_sources;
  out["k_select"] = config.k_select;
  out["epsilon"] = json_real(config.epsilon);
  out["results"] = ordered_json::array();
  for (const std::string& mode : modes) {
    const SelectionAction action =
        mode == "greedy"
            ? greedy_select(instance.gram, coeffs, config.k_select)
            : exhaustive_select(instance.gram, coeffs, config.k_select);
    const double g = log_det_subset(instance.gram, action);
    double reliability = 0.0;
    for (std::size_t i : action.items()) reliability += thetas[i];
    out["results"].push_back({{"oracle", mode},
                              {"selected", action.items()},
                              {"g_term", json_real(g)},
                              {"reliability_term", json_real(reliability)},
                              {"objective", json_real(g + reliability)}});
  }
  return out;
}

}  // namespace probdpp
