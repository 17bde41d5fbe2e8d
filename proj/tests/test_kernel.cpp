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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "probdpp/errors.hpp"
#include "probdpp/kernel.hpp"
#include "probdpp/random.hpp"
#include "test_support.hpp"

namespace probdpp {
namespace {

using testing::cofactor_det;
using testing::DenseMatrix;

FeatureMatrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()),
                    static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return FeatureMatrix::normalized(m);
}

GramMatrix from_dense(const DenseMatrix& d) {
  Eigen::MatrixXd m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
  }
  return GramMatrix(m);
}

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

TEST_CASE("build_gram: identical and orthogonal rows") {
  const GramMatrix same = build_gram(rows({{0.6, 0.8}, {0.6, 0.8}}));
  CHECK(same(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  const GramMatrix orth = build_gram(rows({{1, 0, 0}, {0, 1, 0}}));
  CHECK(orth(0, 1) == 0.0);
  CHECK(orth(0, 0) == 1.0);
}

TEST_CASE("build_gram matches a naive dot-product loop") {
  const FeatureMatrix f = generate_features(4, 3, 11);
  const GramMatrix g = build_gram(f);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> a(3), b(3);
      for (std::size_t c = 0; c < 3; ++c) {
        a[c] = f.data()(i, c);
        b[c] = f.data()(j, c);
      }
      CHECK(std::abs(g(i, j) - testing::naive_dot(a, b)) <= 1e-12);
    }
    CHECK(std::abs(g(i, i) - 1.0) <= 1e-9);
  }
  CHECK((g.data() == g.data().transpose()));
}

TEST_CASE("ridge") {
  const GramMatrix zero(Eigen::MatrixXd::Zero(3, 3));
  CHECK((ridge(zero, 1.0).data() == Eigen::MatrixXd::Identity(3, 3)));
  const GramMatrix id = GramMatrix::identity(2);
  CHECK((ridge(id, 0.5).data() == 1.5 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(ridge(id, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ridge(id, -1.0), InvalidArgument);

  // Duplicate rows: singular without the ridge, factorizable with it.
  const GramMatrix dup = build_gram(rows({{1, 2, 3}, {1, 2, 3}, {0, 0, 1}}));
  const SelectionAction pair(3, {0, 1});
  CHECK_THROWS_AS(log_det_subset(dup, pair), SingularSubmatrix);
  const double ld = log_det_subset(ridge(dup, 1e-8), pair);
  CHECK(std::isfinite(ld));
  CHECK(ld < -15.0);  // det ~ 2e-8
}

TEST_CASE("log_det_subset closed forms") {
  CHECK(log_det_subset(GramMatrix::identity(5), SelectionAction(5, {0, 2, 4})) ==
        0.0);
  const GramMatrix g = from_dense({{1, 0.5}, {0.5, 1}});
  CHECK(log_det_subset(g, SelectionAction(2, {0, 1})) ==
        doctest::Approx(std::log(0.75)).epsilon(1e-14));
  CHECK(std::log(0.75) == doctest::Approx(-0.28768).epsilon(1e-4));
}

TEST_CASE("log_det_subset matches cofactor expansion on random PD matrices") {
  Engine engine(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) a(i, j) = normal(engine);
    Eigen::MatrixXd pd = a * a.transpose();
    pd.diagonal().array() += 0.1;
    pd = 0.5 * (pd + pd.transpose());
    DenseMatrix dense(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) dense[i][j] = pd(i, j);
    const double oracle = std::log(cofactor_det(dense));
    const double got =
        log_det_subset(GramMatrix(pd), SelectionAction(5, {0, 1, 2, 3, 4}));
    CHECK(std::abs(got - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("log_det_subset properties on unit-norm kernels") {
  Engine engine(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + engine() % 9;
    const std::size_t d = 1 + engine() % 10;
    const GramMatrix g =
        ridge(build_gram(generate_features(n, d, engine())), kDefaultRidge);
    std::vector<std::size_t> items(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = i;
    std::shuffle(items.begin(), items.end(), engine);
    items.resize(1 + engine() % std::min<std::size_t>(n, 6));

    const double ld = log_det_subset(g, std::span<const std::size_t>(items));
    // Hadamard: det <= product of the (1 + ridge) diagonal.
    CHECK(ld <= static_cast<double>(items.size()) * std::log1p(kDefaultRidge) +
                    1e-12);
    // Permutation invariance.
    std::vector<std::size_t> permuted = items;
    std::reverse(permuted.begin(), permuted.end());
    CHECK(std::abs(log_det_subset(g, std::span<const std::size_t>(permuted)) -
                   ld) <= 1e-9 * (1.0 + std::abs(ld)));
    // Singletons.
    std::size_t single[] = {items.front()};
    CHECK(std::abs(log_det_subset(g, std::span<const std::size_t>(single))) <=
          2e-8);
  }
}

TEST_CASE("generate_features") {
  const FeatureMatrix a = generate_features(20, 5, 3);
  const FeatureMatrix b = generate_features(20, 5, 3);
  CHECK((a.data().array() == b.data().array()).all());
  CHECK_FALSE((generate_features(20, 5, 4).data().array() ==
               a.data().array()).all());
  for (Eigen::Index i = 0; i < a.data().rows(); ++i) {
    CHECK(std::abs(a.data().row(i).norm() - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(generate_features(0, 3, 1), InvalidArgument);

  const FeatureMatrix big = generate_features(1000, 8, 7);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < 1000; ++i) {
    for (Eigen::Index j = i + 1; j < 1000; ++j) {
      sum += std::abs(big.data().row(i).dot(big.data().row(j)));
      ++pairs;
    }
  }
  CHECK(sum / static_cast<double>(pairs) < 0.5);
}

TEST_CASE("load_features") {
  {
    const FeatureMatrix f = load_features(write_temp("probdpp_one.csv", "1,0,0\n"));
    CHECK(f.rows() == 1);
    CHECK(f.dim() == 3);
    CHECK(f.data()(0, 0) == 1.0);
  }
  {
    const FeatureMatrix f = load_features(write_temp("probdpp_two.csv", "2,0,0\n0,3,4"));
    CHECK(f.rows() == 2);
    CHECK(f.data()(0, 0) == 1.0);
    CHECK(f.data()(1, 1) == doctest::Approx(0.6));
    CHECK(f.data()(1, 2) == doctest::Approx(0.8));
  }
  CHECK_THROWS_AS(load_features(write_temp("probdpp_ragged.csv", "1,0,0\n1,0\n")),
                  ParseError);
  CHECK_THROWS_AS(load_features(write_temp("probdpp_bad.csv", "1,x,0\n")),
                  ParseError);
  CHECK_THROWS_AS(load_features(write_temp("probdpp_zero.csv", "0,0\n")),
                  ParseError);
  CHECK_THROWS_AS(load_features(write_temp("probdpp_empty.csv", "")), EmptyInput);
  CHECK_THROWS_AS(parse_features("1,0\n\n0,1\n"), ParseError);
  CHECK_THROWS_AS(load_features("/nonexistent/probdpp.csv"), ParseError);
}

TEST_CASE("type invariants") {
  CHECK_THROWS_AS(FeatureMatrix(Eigen::MatrixXd::Constant(2, 2, 1.0)),
                  InvalidArgument);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(GramMatrix{asym}, InvalidArgument);
  CHECK_THROWS_AS(SelectionAction(3, {}), InvalidArgument);
  CHECK_THROWS_AS(SelectionAction(3, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(SelectionAction(3, {3}), InvalidArgument);
  const SelectionAction s(5, {4, 1});
  CHECK(s.items() == std::vector<std::size_t>{1, 4});
  CHECK(s.contains(4));
  CHECK_FALSE(s.contains(2));
  const auto bits = s.incidence();
  CHECK(SelectionAction::from_incidence(bits) == s);
}

}  // namespace
}  // namespace probdpp
