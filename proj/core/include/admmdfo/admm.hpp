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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "admmdfo/oracle.hpp"
#include "admmdfo/problem.hpp"
#include "admmdfo/tr_nonsmooth.hpp"
#include "admmdfo/tr_smooth.hpp"

namespace admmdfo {

// Adaptive tolerance sequences:
//   eps1_k = max(c1 / a1^k, eps1),  eps4_k = eps1_k,
//   eps2_k = max(c2 / a2^k, eps2),  eps3_k = (eps3 / eps1) * eps1_k,
//   eps4_kr = max(c4 * (eps1_kr)^a4, eps4_k).
struct ToleranceSchedule {
  double c1 = 1.0, c2 = 1.0, c4 = 1.0;
  double a1 = 2.0, a2 = 2.0, a4 = 1.5;
  double eps1 = 1e-5, eps2 = 1e-5, eps3 = 1e-5, eps4 = 1e-5;

  void validate() const;
};

struct OuterTolerances {
  double eps1_k = 0.0, eps2_k = 0.0, eps3_k = 0.0, eps4_k = 0.0;
};

OuterTolerances tolerance_at(const ToleranceSchedule& schedule, int k);
double inner_radius_tolerance(const ToleranceSchedule& schedule,
                              double eps1_kr, double eps4_k);

enum class ParallelMode { kSequential, kJacobi };

struct OuterConfig {
  double omega = 0.75;       // slack decay threshold
  double gamma = 1.005;      // penalty amplification
  double beta1 = 20.0;       // initial penalty
  double lambda_bound = 1e3; // symmetric dual box; the vectors below override
  Vector lambda_lo, lambda_hi;
  int max_outer = 400;
  int max_inner = 500;
  ParallelMode mode = ParallelMode::kJacobi;
  int threads = 0;  // 0 = hardware concurrency
  double warm_radius_floor = 0.1;
  double warm_radius_factor = 10.0;
  std::uint64_t seed = 1;
  SmoothTrConfig smooth;
  NonsmoothTrConfig nonsmooth;

  void validate() const;
};

struct TraceRow {
  int k = 0;
  int r = 0;
  double lagrangian = 0.0;
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0, eps4 = 0.0;
  double z_norm = 0.0;
  double beta = 0.0;
  long max_block_evals = 0;
  double wall_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
};

struct InnerResiduals {
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
};

// --- Update algebra (pure; exposed for direct testing) ---

// Snapshot closure computing f_i(x_i) + rho/2 ||A_i x_i + w||^2 with
// w = sum_{j != i} A_j x_j + B xbar + z + y/rho - b. Counts one oracle call
// per invocation.
std::function<double(const Vector&)> block_subproblem_objective(
    const AdmmState& state, const BlockProblem& problem, int i);

// Partial minimizer over xbar of the augmented Lagrangian given fresh x.
Vector xbar_update(const AdmmState& state, const BlockProblem& problem);

// z = -(rho/(rho+beta)) (Ax + B xbar + y/rho - b) - lambda/(rho+beta).
Vector z_update(const AdmmState& state, const BlockProblem& problem);

// y + rho (Ax + B xbar + z - b); afterwards lambda + beta z + y = 0.
Vector y_update(const AdmmState& state, const BlockProblem& problem);

InnerResiduals inner_residuals(const AdmmState& prev, const AdmmState& next,
                               const BlockProblem& problem);

// Projected dual ascent and conditional penalty amplification; re-initializes
// y so the dual identity holds at the next inner loop's entry.
void outer_update(AdmmState& state, const OuterConfig& config);

// Primal/dual variables uniform in [0,1] from the seed; y set from the dual
// identity.
AdmmState make_initial_state(const BlockProblem& problem,
                             const OuterConfig& config);

struct SolveReport {
  AdmmState state;
  bool converged = false;
  double objective = 0.0;  // sum_i f_i(x_i) + g(xbar) at the final iterate
  InnerResiduals final_residuals;
  RunTrace trace;
  double wall_s = 0.0;
  long total_evals = 0;
  long max_block_evals = 0;
};

// Two-level inexact scheme: the inner loop alternates parallel (or
// sequential) trust-region block solves with closed-form xbar/z/y updates
// until the per-k residual tolerances hold; the outer loop projects the dual,
// amplifies the penalty while the slack stalls, and tightens tolerances.
class AdmmSolver {
 public:
  AdmmSolver(BlockProblem problem, OuterConfig config,
             ToleranceSchedule schedule);

  SolveReport solve();

  // One inner loop at state.k's tolerances; returns the residuals of the
  // final sweep. Exposed for tests.
  InnerResiduals inner_loop(AdmmState& state);

  // A single inner iteration: block solves to radius tolerance eps4_kr, then
  // the xbar/z/y closed forms, one trace row. Returns the Eq.-style residuals
  // of the sweep and the largest final block radius.
  struct SweepOutcome {
    InnerResiduals residuals;
    double max_block_radius = 0.0;
  };
  SweepOutcome sweep(AdmmState& state, double eps4_kr);

  // Augmented Lagrangian from memoized oracle values (no new evaluations;
  // every state.x[i] must have been produced by a block solve).
  double cached_lagrangian(const AdmmState& state) const;

  const BlockProblem& problem() const { return problem_; }
  const RunTrace& trace() const { return trace_; }

 private:
  struct BlockSolveOutcome {
    Vector x;
    double delta_final = 0.0;
  };
  BlockSolveOutcome solve_block(int i, const Vector& coupled_without_i,
                                const AdmmState& state, double eps4_kr);

  BlockProblem problem_;
  OuterConfig config_;
  ToleranceSchedule schedule_;
  std::vector<std::shared_ptr<EvalMemo>> memos_;
  std::vector<double> warm_radius_;
  RunTrace trace_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace admmdfo
