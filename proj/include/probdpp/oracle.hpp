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

#ifndef PROBDPP_ORACLE_HPP_
#define PROBDPP_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "probdpp/kernel.hpp"

namespace probdpp {

// Upper limit on binomial(N, K) for exhaustive enumeration.
inline constexpr std::uint64_t kMaxEnumeratedActions = 1'000'000;

// Per-item linear coefficients theta of f(a) = g(a) + <a, theta>.
class LinearCoefficients {
 public:
  // Throws InvalidArgument on non-finite entries.
  explicit LinearCoefficients(std::vector<double> thetas);

  std::size_t size() const { return thetas_.size(); }
  double operator[](std::size_t i) const { return thetas_[i]; }
  const std::vector<double>& values() const { return thetas_; }

 private:
  std::vector<double> thetas_;
};

enum class OracleMode { kGreedy, kExhaustive };

// log det G_SS + sum_{i in S} theta_i.
double objective_value(const GramMatrix& gram, const SelectionAction& action,
                       const LinearCoefficients& thetas);

// Grows the subset one item at a time by best marginal gain, lowest index on
// ties. Candidates whose submatrix is not positive definite are skipped; if
// none remain, throws SingularSubmatrix.
SelectionAction greedy_select(const GramMatrix& gram,
                              const LinearCoefficients& thetas, std::size_t k);

// binomial(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// All size-k subsets of {0..n-1} in lexicographic order, with g(a) cached.
// Subsets whose submatrix is singular are kept but marked infeasible.
class ActionTable {
 public:
  // Throws TooLarge when binomial(N, k) exceeds kMaxEnumeratedActions.
  ActionTable(const GramMatrix& gram, std::size_t k);

  std::size_t universe() const { return universe_; }
  std::size_t budget() const { return budget_; }
  std::size_t size() const { return log_dets_.size(); }

  std::span<const std::size_t> items(std::size_t action) const {
    return {items_.data() + action * budget_, budget_};
  }
  SelectionAction action(std::size_t action) const;
  bool feasible(std::size_t action) const { return feasible_[action] != 0; }
  // g(a); only meaningful if feasible(action).
  double log_det(std::size_t action) const { return log_dets_[action]; }

  double value(std::size_t action, const LinearCoefficients& thetas) const;

  // Index of the argmax of f, lexicographically smallest on ties.
  // Throws SingularSubmatrix when no action is feasible.
  std::size_t argmax(const LinearCoefficients& thetas) const;

 private:
  std::size_t universe_;
  std::size_t budget_;
  std::vector<std::size_t> items_;
  std::vector<double> log_dets_;
  std::vector<std::uint8_t> feasible_;
};

// Exact argmax of f over all size-k subsets; ties go to the
// lexicographically smallest subset.
SelectionAction exhaustive_select(const GramMatrix& gram,
                                  const LinearCoefficients& thetas,
                                  std::size_t k);

}  // namespace probdpp

#endif  // PROBDPP_ORACLE_HPP_
