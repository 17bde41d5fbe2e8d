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

#include "probdpp/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "probdpp/errors.hpp"
#include "probdpp/random.hpp"

namespace probdpp {

namespace {

constexpr double kUnitNormTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;

double parse_real(std::string_view field, std::size_t line_no) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                          s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() ||
      ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": not a real number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd rows) : data_(std::move(rows)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidArgument("feature matrix needs N >= 1 and d >= 1");
  }
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    const double norm = data_.row(i).norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTol)) {
      throw InvalidArgument("feature row " + std::to_string(i) +
                            " is not unit norm");
    }
  }
}

FeatureMatrix FeatureMatrix::normalized(Eigen::MatrixXd rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidArgument("feature row " + std::to_string(i) +
                            " cannot be normalized");
    }
    rows.row(i) /= norm;
  }
  return FeatureMatrix(std::move(rows));
}

GramMatrix::GramMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() < 1) {
    throw InvalidArgument("Gram matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < data_.cols(); ++j) {
      if (!(std::abs(data_(i, j) - data_(j, i)) <= kSymmetryTol)) {
        throw InvalidArgument("Gram matrix is not symmetric");
      }
    }
  }
}

GramMatrix GramMatrix::identity(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  return GramMatrix(Eigen::MatrixXd::Identity(size, size));
}

SelectionAction::SelectionAction(std::size_t universe,
                                 std::vector<std::size_t> items)
    : universe_(universe), items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  if (items_.empty() || items_.size() > universe_) {
    throw InvalidArgument("selection needs 1 <= K <= N");
  }
  if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
    throw InvalidArgument("selection has repeated items");
  }
  if (items_.back() >= universe_) {
    throw InvalidArgument("selection index out of range");
  }
}

SelectionAction SelectionAction::from_incidence(
    std::span<const std::uint8_t> bits) {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw InvalidArgument("incidence entries must be 0/1");
    if (bits[i]) items.push_back(i);
  }
  return SelectionAction(bits.size(), std::move(items));
}

bool SelectionAction::contains(std::size_t i) const {
  return std::binary_search(items_.begin(), items_.end(), i);
}

std::vector<std::uint8_t> SelectionAction::incidence() const {
  std::vector<std::uint8_t> bits(universe_, 0);
  for (std::size_t i : items_) bits[i] = 1;
  return bits;
}

GramMatrix build_gram(const FeatureMatrix& features) {
  const Eigen::MatrixXd& f = features.data();
  const Eigen::Index n = f.rows();
  Eigen::MatrixXd g(n, n);
  // Fill the upper triangle and mirror it so the result is exactly symmetric.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = f.row(i).dot(f.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return GramMatrix(std::move(g));
}

GramMatrix ridge(const GramMatrix& gram, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("ridge delta must be > 0");
  Eigen::MatrixXd g = gram.data();
  g.diagonal().array() += delta;
  return GramMatrix(std::move(g));
}

Eigen::MatrixXd principal_submatrix(const GramMatrix& gram,
                                    std::span<const std::size_t> items) {
  const auto k = static_cast<Eigen::Index>(items.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = gram(items[static_cast<std::size_t>(a)],
                       items[static_cast<std::size_t>(b)]);
    }
  }
  return sub;
}

double cholesky_log_det(const Eigen::MatrixXd& matrix) {
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) {
    throw SingularSubmatrix("Cholesky pivot <= 0");
  }
  const auto& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double pivot = l(i, i);
    if (!(pivot > 0.0)) throw SingularSubmatrix("Cholesky pivot <= 0");
    sum += std::log(pivot);
  }
  return 2.0 * sum;
}

double log_det_subset(const GramMatrix& gram, const SelectionAction& subset) {
  if (subset.universe() != gram.size()) {
    throw InvalidArgument("selection universe does not match Gram size");
  }
  return log_det_subset(gram, std::span<const std::size_t>(subset.items()));
}

double log_det_subset(const GramMatrix& gram,
                      std::span<const std::size_t> items) {
  for (std::size_t i : items) {
    if (i >= gram.size()) throw InvalidArgument("subset index out of range");
  }
  return cholesky_log_det(principal_submatrix(gram, items));
}

FeatureMatrix generate_features(std::size_t n, std::size_t d,
                                std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidArgument("generate_features needs n, d >= 1");
  Engine engine(derive_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    // A zero draw has probability zero; redraw to keep the contract total.
    do {
      for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = normal(engine);
    } while (rows.row(i).norm() == 0.0);
  }
  return FeatureMatrix::normalized(std::move(rows));
}

FeatureMatrix parse_features(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      // Only a trailing blank line is tolerated.
      if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) break;
      throw ParseError("line " + std::to_string(line_no) + ": empty row");
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(parse_real(line.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput("feature file has no rows");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
    if (data.row(static_cast<Eigen::Index>(i)).norm() == 0.0) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": zero row cannot be normalized");
    }
  }
  return FeatureMatrix::normalized(std::move(data));
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open feature file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_features(buffer.str());
}

}  // namespace probdpp
