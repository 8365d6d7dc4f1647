// Copyright 2026 The admmdfo Authors
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

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace admmdfo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Bad arguments from the caller (dimension mismatches, invalid config).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A black-box oracle returned a non-finite value.
struct OracleError : std::runtime_error {
  OracleError(std::string what, Vector point)
      : std::runtime_error(std::move(what)), point(std::move(point)) {}
  Vector point;
};

// Non-finite intermediate inside our own arithmetic.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Least-squares matrix is rank deficient beyond tolerance.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The trust-region QP solver ran out of its work budget.
struct QpFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Poised sample points cannot be placed (trust-region radius underflow).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration budget exhausted; carries the best iterate seen so far.
struct BudgetError : std::runtime_error {
  BudgetError(std::string what, Vector best_point, double best_value,
              double radius)
      : std::runtime_error(std::move(what)),
        best_point(std::move(best_point)),
        best_value(best_value),
        radius(radius) {}
  Vector best_point;
  double best_value;
  double radius;
};

// Inner ADMM loop failed to make progress within its iteration cap.
struct StallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace admmdfo
