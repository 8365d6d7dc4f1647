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

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "admmdfo/linalg.hpp"
#include "admmdfo/oracle.hpp"
#include "admmdfo/tr_smooth.hpp"  // TrRecord / TrResult

namespace admmdfo {

// Per-iteration observability for tests and diagnostics.
struct NonsmoothIterationInfo {
  int bundle_size = 0;
  bool reset = false;       // Step-3 criticality reset fired this iteration
  double hess_min = 0.0;    // spectrum of the clipped Hessian
  double hess_max = 0.0;
  double delta = 0.0;
};

struct NonsmoothTrConfig {
  double eta1_bar = 1e-4;   // acceptance threshold on the power ratio
  double theta_bar = 1e-3;  // ratio denominator scale
  double eps_bar = 1.0;     // criticality reset: ||g~|| < eps_bar sqrt(delta)
  double zeta1_bar = 0.5;   // radius contraction on failure
  double zeta2_bar = 1.5;   // radius growth on success
  double zeta_bar = 2.0;    // sampling window as a multiple of the radius
  double p_bar = 1.0;       // power in the ratio denominator
  double delta_exp = 0.25;  // curvature growth exponent in the Hessian clip
  double curve_m = 1e3;     // clip: -lambda_min(H) <= curve_m * delta^-exp
  double curve_M = 1e3;     // clip:  lambda_max(H) <= curve_M * delta^-exp
  double offset_delta = 1e-3;  // regularizer in the offset formula
  int max_directions = 50;
  std::uint64_t rng_seed = 0;
  int max_iters = 500000;
  std::function<void(const NonsmoothIterationInfo&)> iteration_hook;

  void validate() const;
};

// Max-linear model with curvature:
//   m(s) = max_i { f_center + directions_i' s - offsets_i } + 1/2 s' H s.
struct BundleModel {
  Vector center;
  double f_center = 0.0;
  std::vector<Vector> directions;  // unit vectors
  std::vector<double> offsets;     // >= 0
  Matrix hess;
  std::vector<std::pair<Vector, double>> samples;  // within zeta_bar * delta
};

// offsets_i = max_j max{0, f(x) - f(y_j) + g_i'(y_j - x) + delta ||y_j - x||^2}
// over the model's sample set; all zero when the sample set is empty.
std::vector<double> compute_offsets(const BundleModel& model,
                                    double delta_param);

// Convex combination sum_i multipliers_i * directions_i.
Vector aggregate_subgradient(const Vector& multipliers,
                             const std::vector<Vector>& directions);

// Bundle-style trust-region descent for locally Lipschitz black boxes:
// random unit directions, QP trial steps, aggregate-subgradient criticality
// reset, power-ratio acceptance. Terminates when the radius reaches
// stop_radius.
TrResult solve_nonsmooth(Oracle& oracle, const Vector& x0, double delta0,
                         double stop_radius, const NonsmoothTrConfig& config);

}  // namespace admmdfo
