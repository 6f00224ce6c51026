// Copyright 2026 The MBMBR Authors.
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

#ifndef MBMBR_ERRORS_HPP_
#define MBMBR_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbmbr {

// Bad input: files, flags, or arguments a caller can fix. The CLI maps these
// to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant. The CLI maps these to exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptyPoolError : public InputError {
 public:
  using InputError::InputError;
};

// Every reference sits at log-zero, so no model-based weighting exists.
class DegenerateWeightsError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class BudgetError : public InputError {
 public:
  using InputError::InputError;
};

class MalformedSequenceError : public InputError {
 public:
  using InputError::InputError;
};

class DivisionError : public InputError {
 public:
  using InputError::InputError;
};

class AlignmentError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // Zero when the error is not tied to a line.

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mbmbr

#endif  // MBMBR_ERRORS_HPP_
