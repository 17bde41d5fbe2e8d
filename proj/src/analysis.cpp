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

#include "probdpp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "probdpp/errors.hpp"

namespace probdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearCoefficients true_thetas(const ReliabilityVector& alphas,
                               double epsilon) {
  std::vector<double> thetas(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    thetas[i] = reliability_reward(alphas[i], epsilon);
  }
  return LinearCoefficients(std::move(thetas));
}

}  // namespace

TrueObjective::TrueObjective(const GramMatrix& gram,
                             const ReliabilityVector& alphas, double epsilon,
                             std::size_t k)
    : table_(gram, k), thetas_(true_thetas(alphas, epsilon)) {
  if (alphas.size() != gram.size()) {
    throw InvalidArgument("reliability vector length does not match Gram size");
  }
  best_ = table_.argmax(thetas_);
  best_value_ = table_.value(best_, thetas_);
}

double TrueObjective::value(const SelectionAction& action) const {
  if (action.universe() != table_.universe() ||
      action.budget() != table_.budget()) {
    throw InvalidArgument("action does not match the enumerated instance");
  }
  return table_.value(subset_rank(action.items(), table_.universe()), thetas_);
}

double TrueObjective::gap(const SelectionAction& action) const {
  return best_value_ - value(action);
}

double TrueObjective::gap(std::size_t action_index) const {
  if (!table_.feasible(action_index)) return kInf;
  return best_value_ - table_.value(action_index, thetas_);
}

bool TrueObjective::strictly_suboptimal(std::size_t action_index) const {
  return gap(action_index) > kGapTolerance * (1.0 + std::abs(best_value_));
}

std::size_t subset_rank(std::span<const std::size_t> items, std::size_t n) {
  const std::size_t k = items.size();
  std::size_t rank = 0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < k; ++j) {
    // Count the subsets that agree on positions < j and pick a smaller
    // element at position j.
    for (std::size_t v = next; v < items[j]; ++v) {
      rank += static_cast<std::size_t>(binomial(n - 1 - v, k - 1 - j));
    }
    next = items[j] + 1;
  }
  return rank;
}

BestAction best_action(const GramMatrix& gram, const ReliabilityVector& alphas,
                       double epsilon, std::size_t k) {
  TrueObjective objective(gram, alphas, epsilon, k);
  return {objective.table().action(objective.best_index()),
          objective.best_value()};
}

std::vector<ItemGap> item_gaps(const GramMatrix& gram,
                               const ReliabilityVector& alphas, double epsilon,
                               std::size_t k) {
  TrueObjective objective(gram, alphas, epsilon, k);
  const ActionTable& table = objective.table();
  std::vector<ItemGap> gaps(gram.size(), ItemGap{kInf, std::nullopt});
  std::vector<std::size_t> witness(gram.size(), table.size());
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (!table.feasible(a) || !objective.strictly_suboptimal(a)) continue;
    const double g = objective.gap(a);
    for (std::size_t i : table.items(a)) {
      if (g < gaps[i].gap) {
        gaps[i].gap = g;
        witness[i] = a;
      }
    }
  }
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (witness[i] != table.size()) gaps[i].witness = table.action(witness[i]);
  }
  return gaps;
}

std::vector<RegretRecord> regret_curve(std::span<const TraceStep> trace,
                                       const GramMatrix& gram,
                                       const ReliabilityVector& alphas,
                                       double epsilon, std::size_t k) {
  TrueObjective objective(gram, alphas, epsilon, k);
  std::vector<RegretRecord> curve;
  curve.reserve(trace.size());
  double cumulative = 0.0;
  for (const TraceStep& step : trace) {
    const double instant = objective.gap(step.action);
    cumulative += instant;
    curve.push_back({step.t, instant, cumulative});
  }
  return curve;
}

InstanceBounds instance_bounds(const TrueObjective& objective,
                               const ReliabilityVector& alphas,
                               double epsilon) {
  const ActionTable& table = objective.table();
  const std::size_t n = table.universe();
  const std::size_t k = table.budget();
  const double beta = beta_epsilon(epsilon);

  InstanceBounds bounds{0.0, {}, std::nullopt};
  std::vector<double> gaps(n, kInf);
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (!table.feasible(a) || !objective.strictly_suboptimal(a)) continue;
    const double g = objective.gap(a);
    bounds.delta_max = std::max(bounds.delta_max, g);
    for (std::size_t i : table.items(a)) gaps[i] = std::min(gaps[i], g);
  }
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    ItemBound item{i, gaps[i], kNaN, kNaN};
    if (std::isfinite(gaps[i])) {
      item.inflated_alpha =
          std::min(1.0, alphas[i] + gaps[i] / (static_cast<double>(k) * beta));
      item.kl = binary_kl(alphas[i], item.inflated_alpha);
    }
    bounds.per_item.push_back(item);
  }
  if (k == 1) {
    try {
      bounds.lower_constant = lower_bound_constant(alphas, epsilon);
    } catch (const DegenerateInstance&) {
      bounds.lower_constant = std::nullopt;
    }
  }
  return bounds;
}

InstanceBounds instance_bounds(const GramMatrix& gram,
                               const ReliabilityVector& alphas, double epsilon,
                               std::size_t k) {
  return instance_bounds(TrueObjective(gram, alphas, epsilon, k), alphas,
                         epsilon);
}

double theorem_upper_bound(const InstanceBounds& bounds, double c,
                           std::uint64_t horizon) {
  const double numerator = exploration_threshold(horizon, c);
  double sum = 0.0;
  for (const ItemBound& item : bounds.per_item) {
    if (!std::isfinite(item.gap)) continue;
    if (std::isinf(item.kl)) continue;
    if (item.kl == 0.0) return kInf;
    sum += numerator / item.kl;
  }
  return bounds.delta_max * sum;
}

double theorem_upper_bound(const GramMatrix& gram,
                           const ReliabilityVector& alphas, double epsilon,
                           std::size_t k, double c, std::uint64_t horizon) {
  return theorem_upper_bound(instance_bounds(gram, alphas, epsilon, k), c,
                             horizon);
}

double lower_bound_constant(const ReliabilityVector& alphas, double epsilon) {
  if (alphas.size() < 2) {
    throw DegenerateInstance("lower bound needs at least two arms");
  }
  const auto& a = alphas.values();
  const auto best = std::max_element(a.begin(), a.end());
  if (std::count(a.begin(), a.end(), *best) != 1) {
    throw DegenerateInstance("best reliability is not unique");
  }
  const double beta = beta_epsilon(epsilon);
  double constant = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == *best) continue;
    const double kl = binary_kl(a[i], *best);
    if (std::isinf(kl)) continue;
    constant += beta * (*best - a[i]) / kl;
  }
  return constant;
}

}  // namespace probdpp
