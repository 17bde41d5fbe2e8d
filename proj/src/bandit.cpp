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

#include "probdpp/bandit.hpp"

#include <cmath>
#include <limits>

#include "probdpp/errors.hpp"

namespace probdpp {

BanditState::BanditState(std::size_t n) : pulls_(n, 0), successes_(n, 0) {
  if (n < 1) throw InvalidArgument("bandit needs at least one arm");
}

void BanditState::record(const SelectionAction& action,
                         const DropoutMask& mask) {
  if (action.universe() != size() || mask.size() != action.budget()) {
    throw InvalidArgument("feedback does not match the selected action");
  }
  for (std::size_t a = 0; a < mask.size(); ++a) {
    const std::size_t i = action.items()[a];
    ++pulls_[i];
    if (mask[a]) ++successes_[i];
  }
  ++round_;
}

void BanditState::set_counts(std::size_t i, std::uint64_t pulls,
                             std::uint64_t successes) {
  if (successes > pulls) throw InvalidArgument("successes exceed pulls");
  pulls_.at(i) = pulls;
  successes_.at(i) = successes;
}

void KLUCBConfig::validate(std::size_t n) const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("c must be >= 0");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be > 0");
  }
  if (k < 1 || k > n) throw InvalidArgument("need 1 <= k <= N");
  if (!(bisection_tol > 0.0)) {
    throw InvalidArgument("bisection_tol must be > 0");
  }
  if (bisection_max_iter < 1) {
    throw InvalidArgument("bisection_max_iter must be >= 1");
  }
}

double empirical_mean(const BanditState& state, std::size_t i) {
  const std::uint64_t n = state.pulls(i);
  if (n == 0) throw NeverPulled("arm " + std::to_string(i) + " never pulled");
  return static_cast<double>(state.successes(i)) / static_cast<double>(n);
}

double binary_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw OutOfRange("binary_kl arguments must lie in [0, 1]");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double kl = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    kl += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  // Rounding can push kl(p || q) for q close to p a hair below zero.
  return std::max(kl, 0.0);
}

double exploration_threshold(std::uint64_t t, double c) {
  if (t < 1) throw InvalidArgument("rounds are 1-indexed");
  const double log_t = std::log(static_cast<double>(t));
  const double log_log_t = log_t > 1.0 ? std::log(log_t) : 0.0;
  return log_t + c * log_log_t;
}

double klucb_upper(double mean, std::uint64_t pulls, double threshold,
                   double tol, std::size_t max_iter) {
  if (pulls == 0) return 1.0;
  if (mean >= 1.0) return 1.0;
  const double n = static_cast<double>(pulls);
  double lo = mean;  // always feasible: kl(mean || mean) = 0
  double hi = 1.0;   // never feasible: kl(mean || 1) = inf for mean < 1
  for (std::size_t iter = 0; iter < max_iter && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (n * binary_kl(mean, mid) <= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double klucb_index(const BanditState& state, std::size_t i, std::uint64_t t,
                   const KLUCBConfig& cfg) {
  if (state.pulls(i) == 0) return 1.0;
  return klucb_upper(empirical_mean(state, i), state.pulls(i),
                     exploration_threshold(t, cfg.c), cfg.bisection_tol,
                     cfg.bisection_max_iter);
}

LinearCoefficients optimistic_coefficients(const BanditState& state,
                                           std::uint64_t t,
                                           const KLUCBConfig& cfg) {
  std::vector<double> thetas(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    thetas[i] = reliability_reward(klucb_index(state, i, t, cfg), cfg.epsilon);
  }
  return LinearCoefficients(std::move(thetas));
}

namespace {

SelectionAction select_action(const GramMatrix& gram,
                              const LinearCoefficients& thetas,
                              const KLUCBConfig& cfg,
                              const ActionTable* table) {
  if (cfg.oracle == OracleMode::kGreedy) {
    return greedy_select(gram, thetas, cfg.k);
  }
  if (table != nullptr) return table->action(table->argmax(thetas));
  return exhaustive_select(gram, thetas, cfg.k);
}

RoundOutcome play(BanditState& state, const GramMatrix& gram,
                  const KLUCBConfig& cfg, const ActionTable* table,
                  const FeedbackFn& feedback) {
  const std::uint64_t t = state.round() + 1;
  const LinearCoefficients thetas = optimistic_coefficients(state, t, cfg);
  SelectionAction action = select_action(gram, thetas, cfg, table);
  DropoutMask observed = feedback(action);
  state.record(action, observed);
  return {std::move(action), std::move(observed)};
}

}  // namespace

RoundOutcome bandit_round(BanditState& state, const GramMatrix& gram,
                          const KLUCBConfig& cfg, const FeedbackFn& feedback) {
  if (state.size() != gram.size()) {
    throw InvalidArgument("bandit state does not match Gram size");
  }
  cfg.validate(gram.size());
  return play(state, gram, cfg, nullptr, feedback);
}

BanditRunner::BanditRunner(const GramMatrix& gram, KLUCBConfig cfg)
    : gram_(gram), cfg_(cfg), state_(gram.size()) {
  cfg_.validate(gram.size());
  if (cfg_.oracle == OracleMode::kExhaustive) table_.emplace(gram, cfg_.k);
}

RoundOutcome BanditRunner::step(const FeedbackFn& feedback) {
  return play(state_, gram_, cfg_, table(), feedback);
}

std::vector<TraceStep> run_horizon(const GramMatrix& gram,
                                   const KLUCBConfig& cfg,
                                   const ReliabilityVector& alphas,
                                   std::uint64_t horizon, std::uint64_t seed) {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (alphas.size() != gram.size()) {
    throw InvalidArgument("reliability vector length does not match Gram size");
  }
  SourceModel env(alphas, seed);
  BanditRunner runner(gram, cfg);
  const FeedbackFn feedback = [&env](const SelectionAction& a) {
    return env.sample_feedback(a);
  };
  std::vector<TraceStep> trace;
  trace.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    RoundOutcome out = runner.step(feedback);
    trace.push_back({t, std::move(out.action), std::move(out.observed)});
  }
  return trace;
}

}  // namespace probdpp
