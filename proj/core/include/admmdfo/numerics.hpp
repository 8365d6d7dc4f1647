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

#include <utility>
#include <vector>

#include "admmdfo/linalg.hpp"

namespace admmdfo {

// One affine minorant of a piecewise-linear model: offset + direction^T s.
struct LinearCut {
  double offset = 0.0;
  Vector direction;
};

// Trust-region QP:
//   minimize over (s, alpha):  1/2 s^T H s + alpha
//   subject to                 offset_i + direction_i^T s <= alpha  for all i
//                              ||s|| <= radius
struct QpProblem {
  Matrix hessian;
  std::vector<LinearCut> cuts;
  double radius = 0.0;
};

struct QpSolution {
  Vector step;          // s
  double alpha = 0.0;   // epigraph value of the piecewise-linear part
  Vector multipliers;   // one per cut; >= 0 and summing to 1
  double tr_multiplier = 0.0;  // multiplier of ||s||^2 <= radius^2
};

// argmin ||m w - rhs|| via orthogonal factorization. Requires rows >= cols and
// full column rank; throws RankError otherwise (callers may fall back to the
// ridge variant below).
Vector solve_least_squares(const Matrix& m, const Vector& rhs);

// Ridge-regularized least squares with factor 1e-10 * trace(M^T M) / n.
// Never throws on rank deficiency.
Vector solve_least_squares_ridge(const Matrix& m, const Vector& rhs);

// Active-set solver for QpProblem. Returns a KKT point with simplex
// multipliers and complementary slackness; throws QpFailure when the bounded
// work budget is exhausted (callers shrink the radius and retry).
QpSolution solve_tr_qp(const QpProblem& qp);

// Extreme eigenvalues (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> symmetric_eig_bounds(const Matrix& h);

// Exact dense trust-region subproblem:
//   argmin grad^T s + 1/2 s^T hess s  subject to ||s|| <= radius,
// solved in the eigenbasis of hess with a safeguarded secular-equation search.
Vector minimize_quadratic_on_ball(const Vector& grad, const Matrix& hess,
                                  double radius);

}  // namespace admmdfo
