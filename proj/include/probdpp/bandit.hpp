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

#ifndef PROBDPP_BANDIT_HPP_
#define PROBDPP_BANDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "probdpp/environment.hpp"
#include "probdpp/kernel.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/oracle.hpp"

namespace probdpp {

// Per-source pull and success counters after round() completed rounds.
class BanditState {
 public:
  explicit BanditState(std::size_t n);

  std::size_t size() const { return pulls_.size(); }
  std::uint64_t round() const { return round_; }
  std::uint64_t pulls(std::size_t i) const { return pulls_[i]; }
  std::uint64_t successes(std::size_t i) const { return successes_[i]; }

  // Records one round of semi-bandit feedback; mask is aligned with
  // action.items(). Advances round by one.
  void record(const SelectionAction& action, const DropoutMask& mask);

  // Sets counters directly; for analysis and tests. Throws InvalidArgument
  // if successes > pulls.
  void set_counts(std::size_t i, std::uint64_t pulls, std::uint64_t successes);
  void set_round(std::uint64_t round) { round_ = round; }

 private:
  std::vector<std::uint64_t> pulls_;
  std::vector<std::uint64_t> successes_;
  std::uint64_t round_ = 0;
};

struct KLUCBConfig {
  double c = 3.0;
  double epsilon = kDefaultEpsilon;
  std::size_t k = 1;
  double bisection_tol = 1e-9;
  std::size_t bisection_max_iter = 100;
  OracleMode oracle = OracleMode::kGreedy;

  // Throws InvalidArgument unless c >= 0, eps > 0, 1 <= k <= n, tol > 0.
  void validate(std::size_t n) const;
};

// successes / pulls. Throws NeverPulled when pulls == 0.
double empirical_mean(const BanditState& state, std::size_t i);

// Bernoulli KL divergence kl(p || q) with 0 log 0 = 0. Returns +infinity
// when q is 0 or 1 and p differs from q.
double binary_kl(double p, double q);

// log t + c * max(0, log log t), for t >= 1.
double exploration_threshold(std::uint64_t t, double c);

// Largest u in [mean, 1] with pulls * kl(mean || u) <= threshold, by
// bisection. Returns 1 when pulls == 0.
double klucb_upper(double mean, std::uint64_t pulls, double threshold,
                   double tol = 1e-9, std::size_t max_iter = 100);

// KL-UCB index of arm i at round t >= 1, from counts through round t - 1.
double klucb_index(const BanditState& state, std::size_t i, std::uint64_t t,
                   const KLUCBConfig& cfg);

// theta_i = r(U_i(t), eps) for every arm.
LinearCoefficients optimistic_coefficients(const BanditState& state,
                                           std::uint64_t t,
                                           const KLUCBConfig& cfg);

using FeedbackFn = std::function<DropoutMask(const SelectionAction&)>;

struct RoundOutcome {
  SelectionAction action;
  DropoutMask observed;
};

// One round: optimistic coefficients, oracle selection, feedback for the
// selected items only, counter update.
RoundOutcome bandit_round(BanditState& state, const GramMatrix& gram,
                          const KLUCBConfig& cfg, const FeedbackFn& feedback);

// Stateful driver that keeps the enumerated action table across rounds when
// the exhaustive oracle is selected.
class BanditRunner {
 public:
  BanditRunner(const GramMatrix& gram, KLUCBConfig cfg);

  RoundOutcome step(const FeedbackFn& feedback);
  const BanditState& state() const { return state_; }
  const KLUCBConfig& config() const { return cfg_; }
  // Enumeration used by the exhaustive oracle, if any.
  const ActionTable* table() const { return table_ ? &*table_ : nullptr; }

 private:
  SelectionAction select(const LinearCoefficients& thetas) const;

  const GramMatrix& gram_;
  KLUCBConfig cfg_;
  BanditState state_;
  std::optional<ActionTable> table_;
};

struct TraceStep {
  std::uint64_t t;
  SelectionAction action;
  DropoutMask mask;
};

// T rounds from a fresh state against Bernoulli sources seeded with seed.
std::vector<TraceStep> run_horizon(const GramMatrix& gram,
                                   const KLUCBConfig& cfg,
                                   const ReliabilityVector& alphas,
                                   std::uint64_t horizon, std::uint64_t seed);

}  // namespace probdpp

#endif  // PROBDPP_BANDIT_HPP_
