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
#include "admmdfo/oracle.hpp"

namespace admmdfo {

struct SmoothTrConfig {
  double eta0 = 0.0;        // acceptance threshold with a certified model
  double eta1 = 0.1;        // acceptance threshold for radius growth
  double eps_c = 1e-2;      // criticality trigger on the model gradient
  double kappa_fcd = 0.5;   // fraction of Cauchy decrease required of a step
  double alpha = 0.5;       // criticality-loop radius contraction
  double zeta = 0.5;        // radius contraction on certified rejections
  double gamma_inc = 2.0;   // radius growth on success
  double mu = 1.0;          // criticality loop exit: delta <= mu*||g||
  double tau = 0.5;         // criticality clamp: delta >= tau*||g||
  double delta_max = 10.0;
  double kappa_bhm = 1e4;   // spectral clip on model Hessians
  double poisedness_bound = 10.0;  // Lambda threshold for certification
  double sample_reach = 2.0;       // reuse window, as a multiple of the radius
  int max_iters = 200000;

  void validate() const;
};

// Quadratic surrogate m(x) = f_center + g'(x-c) + 1/2 (x-c)' H (x-c) with the
// sample set it was fitted on and its full-linearity certificate.
struct SurrogateModel {
  Vector center;
  double f_center = 0.0;
  Vector g;
  Matrix h;
  std::vector<std::pair<Vector, double>> sample_set;
  bool certified = false;
  double certificate_radius = 0.0;

  double value(const Vector& x) const {
    const Vector d = x - center;
    return f_center + g.dot(d) + 0.5 * d.dot(h * d);
  }
  bool certified_on(double radius) const {
    return certified && certificate_radius >= radius * (1.0 - 1e-12);
  }
};

struct TrRecord {
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  double rho = 0.0;
};

struct TrResult {
  Vector x;
  double f = 0.0;
  double delta_final = 0.0;
  std::vector<TrRecord> trace;
};

// Fit a certified fully linear model on B(center, radius): poised sample
// selection from the oracle's history, minimum-Frobenius-norm quadratic fit
// (exact interpolation on full sets), Lagrange-pivot geometry improvement up
// to the poisedness bound, Hessian eigenvalue clip. Spends oracle calls only
// when the existing geometry is insufficient.
SurrogateModel build_fully_linear(Oracle& oracle, const Vector& center,
                                  double radius, const SmoothTrConfig& config);

// Same fit without geometry-improvement evaluations; the certificate reflects
// whatever the free history supports.
SurrogateModel refit_model(Oracle& oracle, const Vector& center, double radius,
                           const SmoothTrConfig& config);

// Criticality step. Returns the model/radius pair to use this iteration;
// contracts and re-certifies when the model gradient falls under eps_c. The
// loop escapes once the contracted radius reaches stop_radius so the caller's
// termination test fires.
std::pair<SurrogateModel, double> criticality_step(SurrogateModel incumbent,
                                                   double delta_icb,
                                                   double stop_radius,
                                                   Oracle& oracle,
                                                   const SmoothTrConfig& config);

// Trial step within the radius achieving at least the configured fraction of
// Cauchy decrease. A zero model gradient yields a zero step.
Vector compute_step(const SurrogateModel& model, double radius,
                    const SmoothTrConfig& config);

// Model-based trust-region descent, terminating at the first iterate whose
// radius (checked after the criticality step) falls to stop_radius.
TrResult solve_smooth(Oracle& oracle, const Vector& x0, double delta0,
                      double stop_radius, const SmoothTrConfig& config);

}  // namespace admmdfo
