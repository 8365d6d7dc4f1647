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

// Internal: monomial quadratic basis shared by the model-fitting code of the
// two trust-region solvers. Not installed.

#pragma once

#include <utility>

#include "admmdfo/linalg.hpp"
#include "admmdfo/numerics.hpp"

namespace admmdfo::detail {

inline int quad_terms(int n) { return n * (n + 1) / 2; }
inline int full_basis(int n) { return 1 + n + quad_terms(n); }

// [1, t, {t_i t_j (i<j)}, {t_i^2 / 2}] ordered row-major over i<=j.
inline Vector basis_at(const Vector& t) {
  const int n = static_cast<int>(t.size());
  Vector phi(full_basis(n));
  phi(0) = 1.0;
  phi.segment(1, n) = t;
  int idx = 1 + n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      phi(idx++) = (i == j) ? 0.5 * t(i) * t(i) : t(i) * t(j);
    }
  }
  return phi;
}

// Quadratic c0 + g't + 1/2 t'Ht from basis coefficients.
struct QuadPoly {
  double c0 = 0.0;
  Vector g;
  Matrix h;
  double at(const Vector& t) const { return c0 + g.dot(t) + 0.5 * t.dot(h * t); }
};

inline QuadPoly unpack(const Vector& coeffs, int n) {
  QuadPoly p;
  p.c0 = coeffs(0);
  p.g = coeffs.segment(1, n);
  p.h = Matrix::Zero(n, n);
  int idx = 1 + n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double w = coeffs(idx++);
      if (i == j) {
        p.h(i, i) = w;
      } else {
        p.h(i, j) = w;
        p.h(j, i) = w;
      }
    }
  }
  return p;
}

// max over the unit ball of |poly| and its maximizer.
inline std::pair<double, Vector> max_abs_on_unit_ball(const QuadPoly& poly) {
  const Vector t_min = minimize_quadratic_on_ball(poly.g, poly.h, 1.0);
  const Vector t_max = minimize_quadratic_on_ball(-poly.g, -poly.h, 1.0);
  const double v_min = std::abs(poly.at(t_min));
  const double v_max = std::abs(poly.at(t_max));
  return v_max >= v_min ? std::make_pair(v_max, t_max)
                        : std::make_pair(v_min, t_min);
}

}  // namespace admmdfo::detail
