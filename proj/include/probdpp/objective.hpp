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

#ifndef PROBDPP_OBJECTIVE_HPP_
#define PROBDPP_OBJECTIVE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "probdpp/kernel.hpp"

namespace probdpp {

inline constexpr double kDefaultEpsilon = 0.1;

// Per-source success probabilities, each in [0, 1].
class ReliabilityVector {
 public:
  // Throws OutOfRange if any entry is outside [0, 1] or not finite.
  explicit ReliabilityVector(std::vector<double> alphas);

  std::size_t size() const { return alphas_.size(); }
  double operator[](std::size_t i) const { return alphas_[i]; }
  const std::vector<double>& values() const { return alphas_; }

 private:
  std::vector<double> alphas_;
};

// Availability bits z; either aligned with a subset (length K) or length N.
class DropoutMask {
 public:
  DropoutMask() = default;
  // Throws InvalidArgument on entries other than 0/1.
  explicit DropoutMask(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool all_ones() const;

  friend bool operator==(const DropoutMask&, const DropoutMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// The regularization strength eps > 0 of the masked kernel.
class Regularizer {
 public:
  explicit Regularizer(double epsilon = kDefaultEpsilon);
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// Extended-real log-det from the unregularized masked kernel. A singular
// kernel is carried as a tag; there is no implicit conversion to double.
class MaskedLogDet {
 public:
  static MaskedLogDet finite(double value) { return MaskedLogDet(false, value); }
  static MaskedLogDet neg_infinity() { return MaskedLogDet(true, 0.0); }

  bool is_neg_infinity() const { return neg_infinity_; }
  // Throws InvalidArgument when called on the -inf sentinel.
  double value() const;

 private:
  MaskedLogDet(bool neg_infinity, double value)
      : neg_infinity_(neg_infinity), value_(value) {}
  bool neg_infinity_;
  double value_;
};

// r(alpha, eps) = 2 [alpha log(1 + eps) + (1 - alpha) log eps].
double reliability_reward(double alpha, double epsilon);

// Slope of reliability_reward in alpha: 2 log((1 + eps) / eps).
double beta_epsilon(double epsilon);

// log det(M G_SS M) with M = diag(mask). Any dropped item makes the kernel
// singular and yields the -inf sentinel.
MaskedLogDet masked_logdet_naive(const GramMatrix& gram,
                                 const SelectionAction& subset,
                                 const DropoutMask& mask);

// log det((M + eps I) G_SS (M + eps I)), factorized densely.
double regularized_masked_logdet(const GramMatrix& gram,
                                 const SelectionAction& subset,
                                 const DropoutMask& mask,
                                 const Regularizer& reg);

// Right-hand side of the per-sample identity:
// log det G_SS + 2 sum_i log(z_i + eps).
double masked_logdet_identity(const GramMatrix& gram,
                              const SelectionAction& subset,
                              const DropoutMask& mask,
                              const Regularizer& reg);

// Closed-form expected regularized diversity:
// log det G_SS + sum_{i in S} r(alpha_i, eps).
double expected_diversity(const GramMatrix& gram,
                          const SelectionAction& subset,
                          const ReliabilityVector& alphas,
                          const Regularizer& reg);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Averages regularized_masked_logdet over independent Bernoulli(alpha_i)
// masks. Deterministic in seed; std_error uses the n-1 variance and is 0
// for a single sample.
MonteCarloEstimate monte_carlo_diversity(const GramMatrix& gram,
                                         const SelectionAction& subset,
                                         const ReliabilityVector& alphas,
                                         const Regularizer& reg,
                                         std::size_t samples,
                                         std::uint64_t seed);

// Running mean / variance accumulator (Welford) with pooled merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  // Unbiased (n - 1) variance; 0 when count < 2.
  double variance() const;
  double std_error() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace probdpp

#endif  // PROBDPP_OBJECTIVE_HPP_
