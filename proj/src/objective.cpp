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

#include "probdpp/objective.hpp"

#include <algorithm>
#include <cmath>

#include "probdpp/errors.hpp"
#include "probdpp/random.hpp"

namespace probdpp {

namespace {

void check_aligned(const GramMatrix& gram, const SelectionAction& subset,
                   const DropoutMask& mask) {
  if (subset.universe() != gram.size()) {
    throw InvalidArgument("selection universe does not match Gram size");
  }
  if (mask.size() != subset.budget()) {
    throw InvalidArgument("mask length must equal the subset size");
  }
}

void check_alphas(const GramMatrix& gram, const ReliabilityVector& alphas) {
  if (alphas.size() != gram.size()) {
    throw InvalidArgument("reliability vector length does not match Gram size");
  }
}

}  // namespace

ReliabilityVector::ReliabilityVector(std::vector<double> alphas)
    : alphas_(std::move(alphas)) {
  for (double a : alphas_) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw OutOfRange("reliability must lie in [0, 1]");
    }
  }
}

DropoutMask::DropoutMask(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InvalidArgument("mask entries must be 0 or 1");
  }
}

bool DropoutMask::all_ones() const {
  return std::all_of(bits_.begin(), bits_.end(),
                     [](std::uint8_t b) { return b == 1; });
}

Regularizer::Regularizer(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be > 0");
  }
}

double MaskedLogDet::value() const {
  if (neg_infinity_) throw InvalidArgument("masked log-det is -infinity");
  return value_;
}

double reliability_reward(double alpha, double epsilon) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw OutOfRange("reliability must lie in [0, 1]");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return 2.0 * (alpha * std::log1p(epsilon) + (1.0 - alpha) * std::log(epsilon));
}

double beta_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  return 2.0 * (std::log1p(epsilon) - std::log(epsilon));
}

MaskedLogDet masked_logdet_naive(const GramMatrix& gram,
                                 const SelectionAction& subset,
                                 const DropoutMask& mask) {
  check_aligned(gram, subset, mask);
  // A zero on the diagonal of M zeroes a whole row and column of M G M.
  if (!mask.all_ones()) return MaskedLogDet::neg_infinity();
  return MaskedLogDet::finite(log_det_subset(gram, subset));
}

double regularized_masked_logdet(const GramMatrix& gram,
                                 const SelectionAction& subset,
                                 const DropoutMask& mask,
                                 const Regularizer& reg) {
  check_aligned(gram, subset, mask);
  Eigen::MatrixXd sub = principal_submatrix(gram, subset.items());
  const auto k = sub.rows();
  Eigen::VectorXd w(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    w(a) = (mask[static_cast<std::size_t>(a)] ? 1.0 : 0.0) + reg.epsilon();
  }
  const Eigen::MatrixXd kernel = w.asDiagonal() * sub * w.asDiagonal();
  return cholesky_log_det(kernel);
}

double masked_logdet_identity(const GramMatrix& gram,
                              const SelectionAction& subset,
                              const DropoutMask& mask,
                              const Regularizer& reg) {
  check_aligned(gram, subset, mask);
  double value = log_det_subset(gram, subset);
  for (std::size_t a = 0; a < mask.size(); ++a) {
    value += 2.0 * std::log((mask[a] ? 1.0 : 0.0) + reg.epsilon());
  }
  return value;
}

double expected_diversity(const GramMatrix& gram,
                          const SelectionAction& subset,
                          const ReliabilityVector& alphas,
                          const Regularizer& reg) {
  check_alphas(gram, alphas);
  double value = log_det_subset(gram, subset);
  for (std::size_t i : subset.items()) {
    value += reliability_reward(alphas[i], reg.epsilon());
  }
  return value;
}

MonteCarloEstimate monte_carlo_diversity(const GramMatrix& gram,
                                         const SelectionAction& subset,
                                         const ReliabilityVector& alphas,
                                         const Regularizer& reg,
                                         std::size_t samples,
                                         std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  check_alphas(gram, alphas);
  Engine engine(derive_seed(seed, 0x4D43));
  RunningStats stats;
  std::vector<std::uint8_t> bits(subset.budget());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t a = 0; a < bits.size(); ++a) {
      bits[a] = bernoulli(engine, alphas[subset.items()[a]]) ? 1 : 0;
    }
    stats.add(regularized_masked_logdet(gram, subset, DropoutMask(bits), reg));
  }
  return {stats.mean(), stats.std_error(), stats.count()};
}

void RunningStats::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count_);
  const double n2 = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double total = n1 + n2;
  mean_ += delta * n2 / total;
  m2_ += other.m2_ + delta * delta * n1 * n2 / total;
  count_ += other.count_;
}

double RunningStats::variance() const {
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_ - 1);
}

double RunningStats::std_error() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(count_));
}

}  // namespace probdpp
