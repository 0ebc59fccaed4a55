// Copyright 2026 The convlearn Authors. All Rights Reserved.
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

#ifndef CONVLEARN_ERRORS_HPP_
#define CONVLEARN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace convlearn {

// Bad call: wrong vector length, index out of range, empty input.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration violates a model precondition (geometry, step size...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested mode is not available for the given input.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numeric routine produced a non-finite value or failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative learner left its admissible parameter region.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(std::string stage, long iteration)
      : std::runtime_error(stage + " diverged at iteration " +
                           std::to_string(iteration)),
        stage_(std::move(stage)),
        iteration_(iteration) {}

  const std::string& stage() const { return stage_; }
  long iteration() const { return iteration_; }

 private:
  std::string stage_;
  long iteration_;
};

}  // namespace convlearn

#endif  // CONVLEARN_ERRORS_HPP_
