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

#ifndef PROBDPP_ANALYSIS_HPP_
#define PROBDPP_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "probdpp/bandit.hpp"
#include "probdpp/kernel.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/oracle.hpp"

namespace probdpp {

// Relative slack below which two objective values count as tied when
// deciding whether an action is strictly suboptimal.
inline constexpr double kGapTolerance = 1e-10;

struct RegretRecord {
  std::uint64_t t;
  double instant;
  double cumulative;
};

struct BestAction {
  SelectionAction action;
  double value;
};

struct ItemGap {
  // +infinity when no strictly suboptimal action contains the item.
  double gap;
  std::optional<SelectionAction> witness;
};

struct ItemBound {
  std::size_t item;
  double gap;             // Delta_i, possibly +infinity
  double inflated_alpha;  // alpha_i^+; NaN when gap is infinite
  double kl;              // kl(alpha_i || alpha_i^+); NaN when gap is infinite
};

struct InstanceBounds {
  double delta_max;
  std::vector<ItemBound> per_item;
  std::optional<double> lower_constant;  // K = 1 with a unique best arm only
};

// True objective f(a) = g(a) + sum_i r(alpha_i, eps) over every size-k
// action, with the best action and per-action gaps.
class TrueObjective {
 public:
  // Throws TooLarge when the action count exceeds the enumeration guard.
  TrueObjective(const GramMatrix& gram, const ReliabilityVector& alphas,
                double epsilon, std::size_t k);

  const ActionTable& table() const { return table_; }
  const LinearCoefficients& thetas() const { return thetas_; }
  std::size_t best_index() const { return best_; }
  double best_value() const { return best_value_; }

  double value(const SelectionAction& action) const;
  // f(A*) - f(action).
  double gap(const SelectionAction& action) const;
  double gap(std::size_t action_index) const;
  bool strictly_suboptimal(std::size_t action_index) const;

 private:
  ActionTable table_;
  LinearCoefficients thetas_;
  std::size_t best_;
  double best_value_;
};

// Lexicographic rank of a sorted k-subset of {0..n-1}.
std::size_t subset_rank(std::span<const std::size_t> items, std::size_t n);

BestAction best_action(const GramMatrix& gram, const ReliabilityVector& alphas,
                       double epsilon, std::size_t k);

std::vector<ItemGap> item_gaps(const GramMatrix& gram,
                               const ReliabilityVector& alphas, double epsilon,
                               std::size_t k);

// Pseudo-regret of the played actions under the true objective.
std::vector<RegretRecord> regret_curve(std::span<const TraceStep> trace,
                                       const GramMatrix& gram,
                                       const ReliabilityVector& alphas,
                                       double epsilon, std::size_t k);

InstanceBounds instance_bounds(const GramMatrix& gram,
                               const ReliabilityVector& alphas, double epsilon,
                               std::size_t k);
InstanceBounds instance_bounds(const TrueObjective& objective,
                               const ReliabilityVector& alphas, double epsilon);

// Main logarithmic term of the KL-UCB regret bound:
//   Delta_max * sum_i (log T + c log log T) / kl(alpha_i || alpha_i^+).
// Items with infinite gap are skipped and items with infinite kl contribute
// zero. A zero kl (alpha_i = 1 on a suboptimal action) makes the bound
// +infinity.
double theorem_upper_bound(const InstanceBounds& bounds, double c,
                           std::uint64_t horizon);
double theorem_upper_bound(const GramMatrix& gram,
                           const ReliabilityVector& alphas, double epsilon,
                           std::size_t k, double c, std::uint64_t horizon);

// sum_{i != i*} beta_eps (alpha_{i*} - alpha_i) / kl(alpha_i || alpha_{i*}),
// the log T coefficient for the single-item instance. Throws
// DegenerateInstance when the best reliability is not unique.
double lower_bound_constant(const ReliabilityVector& alphas, double epsilon);

}  // namespace probdpp

#endif  // PROBDPP_ANALYSIS_HPP_
