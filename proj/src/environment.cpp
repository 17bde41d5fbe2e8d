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

#include "probdpp/environment.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "probdpp/errors.hpp"

namespace probdpp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

double to_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw ParseError("alpha spec: not a real number: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_seed(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("alpha spec: bad seed '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void check_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw OutOfRange("alpha spec: value " + std::to_string(v) +
                     " outside [0, 1]");
  }
}

std::pair<double, double> parse_range(std::string_view s) {
  auto bounds = split(s, ',');
  if (bounds.size() != 2) {
    throw ParseError("alpha spec: range must be 'lo,hi'");
  }
  const double lo = to_real(bounds[0]);
  const double hi = to_real(bounds[1]);
  check_unit(lo);
  check_unit(hi);
  if (lo > hi) throw ParseError("alpha spec: lo > hi");
  return {lo, hi};
}

}  // namespace

SourceModel::SourceModel(ReliabilityVector alphas, std::uint64_t seed)
    : alphas_(std::move(alphas)), seed_(seed), draws_(alphas_.size(), 0) {
  streams_.reserve(alphas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    streams_.emplace_back(derive_seed(seed, i));
  }
}

DropoutMask SourceModel::sample_feedback(const SelectionAction& subset) {
  if (subset.universe() != alphas_.size()) {
    throw InvalidArgument("selection universe does not match source count");
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(subset.budget());
  for (std::size_t i : subset.items()) {
    bits.push_back(bernoulli(streams_[i], alphas_[i]) ? 1 : 0);
    ++draws_[i];
  }
  return DropoutMask(std::move(bits));
}

ReliabilityVector alpha_spec_parse(std::string_view spec, std::size_t n) {
  spec = trim(spec);
  if (spec.empty()) throw ParseError("alpha spec is empty");
  if (n < 1) throw InvalidArgument("alpha spec needs n >= 1");
  std::vector<double> alphas;
  alphas.reserve(n);

  if (spec.starts_with("linspace:")) {
    auto [lo, hi] = parse_range(spec.substr(9));
    for (std::size_t i = 0; i < n; ++i) {
      const double frac =
          n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      alphas.push_back(i + 1 == n && n > 1 ? hi : lo + (hi - lo) * frac);
    }
  } else if (spec.starts_with("uniform:")) {
    auto parts = split(spec.substr(8), ':');
    if (parts.size() != 2) {
      throw ParseError("alpha spec: expected 'uniform:lo,hi:seed'");
    }
    auto [lo, hi] = parse_range(parts[0]);
    Engine engine(derive_seed(to_seed(parts[1]), 0x414C));
    for (std::size_t i = 0; i < n; ++i) {
      alphas.push_back(lo + (hi - lo) * uniform01(engine));
    }
  } else {
    for (auto field : split(spec, ',')) {
      const double v = to_real(field);
      check_unit(v);
      alphas.push_back(v);
    }
    if (alphas.size() != n) {
      throw ParseError("alpha spec lists " + std::to_string(alphas.size()) +
                       " values, expected " + std::to_string(n));
    }
  }
  return ReliabilityVector(std::move(alphas));
}

}  // namespace probdpp
