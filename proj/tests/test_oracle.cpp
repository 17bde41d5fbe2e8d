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
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "probdpp/errors.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/oracle.hpp"
#include "probdpp/random.hpp"
#include "test_support.hpp"

namespace probdpp {
namespace {

struct Case {
  GramMatrix gram;
  LinearCoefficients thetas;
};

Case random_case(std::size_t n, std::uint64_t seed) {
  Engine engine(seed);
  GramMatrix g = ridge(build_gram(generate_features(n, 8, engine())), kDefaultRidge);
  std::vector<double> t(n);
  for (auto& x : t) x = reliability_reward(uniform01(engine), 0.1);
  return {std::move(g), LinearCoefficients(t)};
}

// Brute-force oracle: explicit subset list and fresh Eigen determinant.
std::pair<std::vector<std::size_t>, double> brute_force(const Case& c,
                                                        std::size_t k) {
  std::vector<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& s : testing::all_subsets(c.gram.size(), k)) {
    Eigen::MatrixXd sub(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) sub(a, b) = c.gram(s[a], s[b]);
    double v = std::log(sub.determinant());
    for (std::size_t i : s) v += c.thetas[i];
    if (v > best_value) {
      best_value = v;
      best = s;
    }
  }
  return {best, best_value};
}

TEST_CASE("objective_value") {
  const GramMatrix id = GramMatrix::identity(4);
  const LinearCoefficients zero(std::vector<double>(4, 0.0));
  CHECK(objective_value(id, SelectionAction(4, {1, 3}), zero) == 0.0);

  const Case c = random_case(7, 3);
  const SelectionAction s(7, {0, 4, 6});
  const double ld = log_det_subset(c.gram, s);
  double dot = 0.0;
  const auto bits = s.incidence();
  for (std::size_t i = 0; i < 7; ++i) dot += bits[i] * c.thetas[i];
  CHECK(std::abs(objective_value(c.gram, s, c.thetas) - (ld + dot)) <= 1e-12);
}

TEST_CASE("identity kernel reduces to top-K theta") {
  const GramMatrix id = GramMatrix::identity(3);
  const LinearCoefficients rising({1, 2, 3});
  const SelectionAction ex = exhaustive_select(id, rising, 2);
  CHECK(ex.items() == std::vector<std::size_t>{1, 2});
  CHECK(objective_value(id, ex, rising) == 5.0);
  CHECK(greedy_select(id, rising, 2) == ex);

  const LinearCoefficients t({0.3, 0.1, 0.9});
  const SelectionAction gr = greedy_select(id, t, 2);
  CHECK(gr.items() == std::vector<std::size_t>{0, 2});
  CHECK(exhaustive_select(id, t, 2) == gr);
}

TEST_CASE("full selection when K = N") {
  const Case c = random_case(5, 8);
  const std::vector<std::size_t> all{0, 1, 2, 3, 4};
  CHECK(exhaustive_select(c.gram, c.thetas, 5).items() == all);
  CHECK(greedy_select(c.gram, c.thetas, 5).items() == all);
}

TEST_CASE("greedy avoids duplicate embeddings") {
  Eigen::MatrixXd f(3, 3);
  f << 1, 0, 0, 1, 0, 0, 0, 1, 0;
  const GramMatrix g =
      ridge(build_gram(FeatureMatrix::normalized(f)), kDefaultRidge);
  const LinearCoefficients equal({0.5, 0.5, 0.5});
  const SelectionAction s = greedy_select(g, equal, 2);
  CHECK_FALSE((s.contains(0) && s.contains(1)));
  CHECK(s.items() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("greedy skips singular candidates, fails when none remain") {
  Eigen::MatrixXd f(3, 2);
  f << 1, 0, 1, 0, 0, 1;
  const GramMatrix g = build_gram(FeatureMatrix::normalized(f));  // no ridge
  const LinearCoefficients t({0.0, 5.0, 0.0});
  CHECK(greedy_select(g, t, 2).items() == std::vector<std::size_t>{1, 2});
  CHECK_THROWS_AS(greedy_select(g, t, 3), SingularSubmatrix);
}

TEST_CASE("exhaustive_select agrees with brute force and dominates greedy") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Case c = random_case(8, 100 + seed);
    const auto [best, best_value] = brute_force(c, 3);
    const SelectionAction ex = exhaustive_select(c.gram, c.thetas, 3);
    CHECK(ex.items() == best);
    const double ex_value = objective_value(c.gram, ex, c.thetas);
    CHECK(std::abs(ex_value - best_value) <= 1e-9);
    const SelectionAction gr = greedy_select(c.gram, c.thetas, 3);
    CHECK(gr.budget() == 3);
    CHECK(ex_value >= objective_value(c.gram, gr, c.thetas) - 1e-12);
    CHECK(greedy_select(c.gram, c.thetas, 3) == gr);
  }
}

TEST_CASE("constant shift of theta leaves both argmaxes unchanged") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Case c = random_case(9, 500 + seed);
    const double shift = seed % 2 ? 2.5 : -7.0;
    std::vector<double> shifted = c.thetas.values();
    for (auto& x : shifted) x += shift;
    const LinearCoefficients st(shifted);
    const SelectionAction ex = exhaustive_select(c.gram, c.thetas, 4);
    CHECK(exhaustive_select(c.gram, st, 4) == ex);
    CHECK(greedy_select(c.gram, st, 4) == greedy_select(c.gram, c.thetas, 4));
    CHECK(std::abs(objective_value(c.gram, ex, st) -
                   objective_value(c.gram, ex, c.thetas) - 4 * shift) <= 1e-9);
  }
  // Ties: all-equal theta on the identity kernel stays lexicographic.
  const GramMatrix id = GramMatrix::identity(5);
  const SelectionAction first(5, {0, 1});
  CHECK(exhaustive_select(id, LinearCoefficients({1, 1, 1, 1, 1}), 2) == first);
  CHECK(exhaustive_select(id, LinearCoefficients({4, 4, 4, 4, 4}), 2) == first);
  CHECK(greedy_select(id, LinearCoefficients({4, 4, 4, 4, 4}), 2) == first);
}

TEST_CASE("ActionTable enumeration and guard") {
  const Case c = random_case(6, 1);
  const ActionTable table(c.gram, 3);
  const auto expected = testing::all_subsets(6, 3);
  REQUIRE(table.size() == expected.size());
  for (std::size_t a = 0; a < table.size(); ++a) {
    auto items = table.items(a);
    CHECK(std::vector<std::size_t>(items.begin(), items.end()) == expected[a]);
    CHECK(table.feasible(a));
  }
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(50, 25) == 126410606437752ULL);
  CHECK(binomial(3, 5) == 0);
  const GramMatrix big = GramMatrix::identity(40);
  CHECK_THROWS_AS(exhaustive_select(big, LinearCoefficients(std::vector<double>(40, 0.0)), 10),
                  TooLarge);
  CHECK_THROWS_AS(greedy_select(c.gram, c.thetas, 0), InvalidArgument);
  CHECK_THROWS_AS(greedy_select(c.gram, c.thetas, 7), InvalidArgument);
  CHECK_THROWS_AS(LinearCoefficients({1.0, std::nan("")}), InvalidArgument);
}

}  // namespace
}  // namespace probdpp
