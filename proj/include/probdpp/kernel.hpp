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

#ifndef PROBDPP_KERNEL_HPP_
#define PROBDPP_KERNEL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace probdpp {

// Default ridge added to the Gram matrix before any log-det is taken.
inline constexpr double kDefaultRidge = 1e-8;

// N unit-norm feature rows of dimension d.
class FeatureMatrix {
 public:
  // Throws InvalidArgument unless every row has norm 1 to within 1e-9.
  explicit FeatureMatrix(Eigen::MatrixXd rows);

  // Rescales every row to unit norm. Throws InvalidArgument on a zero row.
  static FeatureMatrix normalized(Eigen::MatrixXd rows);

  std::size_t rows() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  Eigen::MatrixXd data_;
};

// Symmetric N x N similarity kernel.
class GramMatrix {
 public:
  // Throws InvalidArgument if not square or not symmetric to 1e-12.
  explicit GramMatrix(Eigen::MatrixXd data);

  static GramMatrix identity(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  Eigen::MatrixXd data_;
};

// A size-K subset of {0, ..., N-1}, stored as sorted indices.
class SelectionAction {
 public:
  // Indices may arrive in any order; they must be distinct and < universe.
  SelectionAction(std::size_t universe, std::vector<std::size_t> items);

  static SelectionAction from_incidence(std::span<const std::uint8_t> bits);

  std::size_t universe() const { return universe_; }
  std::size_t budget() const { return items_.size(); }
  const std::vector<std::size_t>& items() const { return items_; }
  bool contains(std::size_t i) const;
  std::vector<std::uint8_t> incidence() const;

  friend bool operator==(const SelectionAction&,
                         const SelectionAction&) = default;

 private:
  std::size_t universe_;
  std::vector<std::size_t> items_;
};

GramMatrix build_gram(const FeatureMatrix& features);

// gram + delta * I. Throws InvalidArgument if delta <= 0.
GramMatrix ridge(const GramMatrix& gram, double delta);

// Dense copy of gram[S, S] in the order of subset.items().
Eigen::MatrixXd principal_submatrix(const GramMatrix& gram,
                                    std::span<const std::size_t> items);

// log det via Cholesky, 2 * sum(log L_ii). Throws SingularSubmatrix when a
// pivot is not strictly positive.
double cholesky_log_det(const Eigen::MatrixXd& matrix);

double log_det_subset(const GramMatrix& gram, const SelectionAction& subset);

// Same, but over an arbitrary index list (order irrelevant).
double log_det_subset(const GramMatrix& gram,
                      std::span<const std::size_t> items);

// Isotropic Gaussian rows normalized to the unit sphere; deterministic in seed.
FeatureMatrix generate_features(std::size_t n, std::size_t d,
                                std::uint64_t seed);

// Headerless CSV, one source per line. Rows are renormalized.
// Throws ParseError on malformed or ragged rows, EmptyInput on no rows.
FeatureMatrix load_features(const std::filesystem::path& path);
FeatureMatrix parse_features(std::string_view text);

}  // namespace probdpp

#endif  // PROBDPP_KERNEL_HPP_
