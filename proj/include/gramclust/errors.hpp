// Copyright 2026 The gramclust Authors.
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

#ifndef GRAMCLUST_ERRORS_HPP_
#define GRAMCLUST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gramclust {

enum class ErrorKind {
  kParseError,
  kNotPSD,
  kNotCentered,
  kDegenerateB,
  kInfeasible,
  kDimensionMismatch,
  kLabelOutOfRange,
  kTooLarge,
  kTooFewTrials,
  kZeroMass,
  kInvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kNotPSD: return "NotPSD";
    case ErrorKind::kNotCentered: return "NotCentered";
    case ErrorKind::kDegenerateB: return "DegenerateB";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kTooFewTrials: return "TooFewTrials";
    case ErrorKind::kZeroMass: return "ZeroMass";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// All library failures are reported as this exception; `kind()` is the
/// machine-readable category the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gramclust

#endif  // GRAMCLUST_ERRORS_HPP_
