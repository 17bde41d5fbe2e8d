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

#ifndef PROBDPP_ERRORS_HPP_
#define PROBDPP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace probdpp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad size, K > N, eps <= 0...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A Cholesky pivot was <= 0; the caller must ridge the kernel or reject.
class SingularSubmatrix : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the subset-count guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// Empirical mean requested for an arm that has never been pulled.
class NeverPulled : public Error {
 public:
  using Error::Error;
};

// The K=1 lower-bound constant needs a unique best arm.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

// Experiment configuration rejected; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace probdpp

#endif  // PROBDPP_ERRORS_HPP_
