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

#ifndef PROBDPP_ENVIRONMENT_HPP_
#define PROBDPP_ENVIRONMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "probdpp/kernel.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/random.hpp"

namespace probdpp {

// Stationary Bernoulli sources. Each source owns a substream derived from
// (seed, source index), so a source's draw sequence depends only on how many
// times that source was queried.
class SourceModel {
 public:
  SourceModel(ReliabilityVector alphas, std::uint64_t seed);

  const ReliabilityVector& alphas() const { return alphas_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return alphas_.size(); }
  // Number of draws taken so far from source i.
  std::uint64_t draws(std::size_t i) const { return draws_[i]; }

  // One bit per selected item, aligned with subset.items(). Unselected
  // sources are not touched.
  DropoutMask sample_feedback(const SelectionAction& subset);

 private:
  ReliabilityVector alphas_;
  std::uint64_t seed_;
  std::vector<Engine> streams_;
  std::vector<std::uint64_t> draws_;
};

// Parses "a,b,c", "linspace:lo,hi" or "uniform:lo,hi:seed" into a length-n
// vector. Throws ParseError on bad syntax or a list of the wrong length and
// OutOfRange on values outside [0, 1].
ReliabilityVector alpha_spec_parse(std::string_view spec, std::size_t n);

}  // namespace probdpp

#endif  // PROBDPP_ENVIRONMENT_HPP_
