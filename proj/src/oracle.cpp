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

#include "probdpp/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "probdpp/errors.hpp"

namespace probdpp {

namespace {

void check_sizes(const GramMatrix& gram, const LinearCoefficients& thetas,
                 std::size_t k) {
  if (thetas.size() != gram.size()) {
    throw InvalidArgument("coefficient length does not match Gram size");
  }
  if (k < 1 || k > gram.size()) throw InvalidArgument("need 1 <= k <= N");
}

}  // namespace

LinearCoefficients::LinearCoefficients(std::vector<double> thetas)
    : thetas_(std::move(thetas)) {
  for (double t : thetas_) {
    if (!std::isfinite(t)) throw InvalidArgument("coefficients must be finite");
  }
}

double objective_value(const GramMatrix& gram, const SelectionAction& action,
                       const LinearCoefficients& thetas) {
  if (thetas.size() != gram.size()) {
    throw InvalidArgument("coefficient length does not match Gram size");
  }
  double value = log_det_subset(gram, action);
  for (std::size_t i : action.items()) value += thetas[i];
  return value;
}

SelectionAction greedy_select(const GramMatrix& gram,
                              const LinearCoefficients& thetas, std::size_t k) {
  check_sizes(gram, thetas, k);
  const std::size_t n = gram.size();
  std::vector<std::size_t> chosen;
  std::vector<std::uint8_t> taken(n, 0);
  chosen.reserve(k);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_value = -std::numeric_limits<double>::infinity();
    chosen.push_back(0);
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      chosen.back() = c;
      double value;
      try {
        value = log_det_subset(gram, std::span<const std::size_t>(chosen));
      } catch (const SingularSubmatrix&) {
        continue;
      }
      for (std::size_t i : chosen) value += thetas[i];
      // f(chosen) - f(previous) ranks the same as f(chosen); strict >
      // keeps the lowest index on ties.
      if (best == n || value > best_value) {
        best = c;
        best_value = value;
      }
    }
    if (best == n) {
      throw SingularSubmatrix("greedy: no candidate keeps the submatrix PD");
    }
    chosen.back() = best;
    taken[best] = 1;
  }
  return SelectionAction(n, std::move(chosen));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const std::uint64_t factor = n - k + i;
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * factor / i;
  }
  return result;
}

ActionTable::ActionTable(const GramMatrix& gram, std::size_t k)
    : universe_(gram.size()), budget_(k) {
  if (k < 1 || k > universe_) throw InvalidArgument("need 1 <= k <= N");
  const std::uint64_t count = binomial(universe_, k);
  if (count > kMaxEnumeratedActions) {
    throw TooLarge("binomial(" + std::to_string(universe_) + ", " +
                   std::to_string(k) + ") exceeds the enumeration guard");
  }
  items_.reserve(count * k);
  log_dets_.reserve(count);
  feasible_.reserve(count);
  std::vector<std::size_t> combo(k);
  for (std::size_t i = 0; i < k; ++i) combo[i] = i;
  while (true) {
    items_.insert(items_.end(), combo.begin(), combo.end());
    try {
      log_dets_.push_back(
          log_det_subset(gram, std::span<const std::size_t>(combo)));
      feasible_.push_back(1);
    } catch (const SingularSubmatrix&) {
      log_dets_.push_back(-std::numeric_limits<double>::infinity());
      feasible_.push_back(0);
    }
    // Advance to the next combination in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && combo[pos - 1] == universe_ - k + pos - 1) --pos;
    if (pos == 0) break;
    ++combo[pos - 1];
    for (std::size_t j = pos; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
}

SelectionAction ActionTable::action(std::size_t action) const {
  auto span = items(action);
  return SelectionAction(universe_,
                         std::vector<std::size_t>(span.begin(), span.end()));
}

double ActionTable::value(std::size_t action,
                          const LinearCoefficients& thetas) const {
  double v = log_dets_[action];
  for (std::size_t i : items(action)) v += thetas[i];
  return v;
}

std::size_t ActionTable::argmax(const LinearCoefficients& thetas) const {
  if (thetas.size() != universe_) {
    throw InvalidArgument("coefficient length does not match Gram size");
  }
  std::size_t best = size();
  double best_value = 0.0;
  for (std::size_t a = 0; a < size(); ++a) {
    if (!feasible_[a]) continue;
    const double v = value(a, thetas);
    if (best == size() || v > best_value) {
      best = a;
      best_value = v;
    }
  }
  if (best == size()) throw SingularSubmatrix("no feasible action");
  return best;
}

SelectionAction exhaustive_select(const GramMatrix& gram,
                                  const LinearCoefficients& thetas,
                                  std::size_t k) {
  check_sizes(gram, thetas, k);
  ActionTable table(gram, k);
  return table.action(table.argmax(thetas));
}

}  // namespace probdpp
