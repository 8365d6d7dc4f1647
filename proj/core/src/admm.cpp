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

#include "admmdfo/admm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "admmdfo/numerics.hpp"

namespace admmdfo {

namespace {

constexpr double kDualIdentityTol = 1e-8;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - since)
      .count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t x = seed ^ (a * 0x9e3779b97f4a7c15ull) ^
                    (b * 0xbf58476d1ce4e5b9ull) ^ (c * 0x94d049bb133111ebull);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Oracle over one block: memoized raw f_i plus the analytic quadratic
// penalty of the current coupling. History points keep their raw f_i values,
// so they stay reusable as the coupling moves between inner iterations.
class BlockOracle final : public Oracle {
 public:
  BlockOracle(EvalMemo& memo, const Matrix& a, Vector w, double rho)
      : memo_(memo), a_(a), w_(std::move(w)), rho_(rho) {}

  double penalty(const Vector& x) const {
    return 0.5 * rho_ * (a_ * x + w_).squaredNorm();
  }

  double operator()(const Vector& x) override {
    return memo_.value(x) + penalty(x);
  }

  std::vector<std::pair<Vector, double>> nearby(const Vector& center,
                                                double radius) override {
    return memo_.nearby(center, radius, [this](const Vector& pt, double raw) {
      return raw + penalty(pt);
    });
  }

 private:
  EvalMemo& memo_;
  const Matrix& a_;
  Vector w_;
  double rho_;
};

void check_state_shapes(const AdmmState& state, const BlockProblem& problem) {
  const int m = problem.constraint_rows();
  if (static_cast<int>(state.x.size()) != problem.num_blocks() ||
      state.x_bar.size() != problem.shared_dim() || state.z.size() != m ||
      state.y.size() != m || state.lambda.size() != m) {
    throw InputError("admm: state shapes do not match the problem");
  }
  if (state.beta <= 0.0 || std::abs(state.rho - 2.0 * state.beta) >
                               1e-12 * (1.0 + state.rho)) {
    throw InputError("admm: rho must equal 2*beta");
  }
}

void check_dual_identity(const AdmmState& state) {
  const double gap = (state.lambda + state.beta * state.z + state.y).norm();
  if (gap > kDualIdentityTol * (1.0 + state.lambda.norm())) {
    throw NumericError("admm: dual identity violated");
  }
}

Vector resolve_bound(const Vector& given, int m, double fallback) {
  if (given.size() == m) return given;
  if (given.size() != 0) throw InputError("admm: lambda bound has wrong size");
  return Vector::Constant(m, fallback);
}

}  // namespace

void ToleranceSchedule::validate() const {
  auto in_12 = [](double v) { return v >= 1.0 && v <= 2.0; };
  const bool ok = in_12(c1) && in_12(c2) && in_12(c4) && in_12(a1) &&
                  in_12(a2) && in_12(a4) && eps1 > 0.0 && eps2 > 0.0 &&
                  eps3 > 0.0 && eps4 > 0.0;
  if (!ok) throw InputError("ToleranceSchedule: parameters out of range");
}

OuterTolerances tolerance_at(const ToleranceSchedule& schedule, int k) {
  if (k < 1) throw InputError("tolerance_at: k must be >= 1");
  OuterTolerances out;
  out.eps1_k = std::max(schedule.c1 / std::pow(schedule.a1, k), schedule.eps1);
  out.eps4_k = out.eps1_k;
  out.eps2_k = std::max(schedule.c2 / std::pow(schedule.a2, k), schedule.eps2);
  out.eps3_k = (schedule.eps3 / schedule.eps1) * out.eps1_k;
  return out;
}

double inner_radius_tolerance(const ToleranceSchedule& schedule,
                              double eps1_kr, double eps4_k) {
  return std::max(schedule.c4 * std::pow(eps1_kr, schedule.a4), eps4_k);
}

void OuterConfig::validate() const {
  const bool ok = omega >= 0.0 && omega < 1.0 && gamma > 1.0 && beta1 > 0.0 &&
                  lambda_bound > 0.0 && max_outer >= 1 && max_inner >= 1 &&
                  warm_radius_floor > 0.0 && warm_radius_factor >= 1.0;
  if (!ok) throw InputError("OuterConfig: parameters out of range");
  smooth.validate();
  nonsmooth.validate();
}

std::function<double(const Vector&)> block_subproblem_objective(
    const AdmmState& state, const BlockProblem& problem, int i) {
  check_state_shapes(state, problem);
  if (i < 0 || i >= problem.num_blocks()) {
    throw InputError("block_subproblem_objective: bad block index");
  }
  Vector w = problem.b_mat() * state.x_bar + state.z + state.y / state.rho -
             problem.b_vec();
  for (int j = 0; j < problem.num_blocks(); ++j) {
    if (j != i) w.noalias() += problem.a(j) * state.x[j];
  }
  const Matrix a_i = problem.a(i);
  const double rho = state.rho;
  return [&problem, i, a_i, w = std::move(w), rho](const Vector& x) {
    return problem.evaluate_block(i, x) +
           0.5 * rho * (a_i * x + w).squaredNorm();
  };
}

Vector xbar_update(const AdmmState& state, const BlockProblem& problem) {
  check_state_shapes(state, problem);
  if (problem.shared_dim() == 0) return Vector(0);
  const Vector v = coupled_sum(state, problem) + state.z +
                   state.y / state.rho - problem.b_vec();
  if (problem.has_shared()) {
    return problem.shared().closed_form_minimizer(problem.b_mat(), v,
                                                  state.rho);
  }
  // g == 0: argmin ||v + B xbar||.
  return solve_least_squares(problem.b_mat(), -v);
}

Vector z_update(const AdmmState& state, const BlockProblem& problem) {
  check_state_shapes(state, problem);
  const Vector v = coupled_sum(state, problem) +
                   problem.b_mat() * state.x_bar + state.y / state.rho -
                   problem.b_vec();
  const double denom = state.rho + state.beta;
  return -(state.rho / denom) * v - state.lambda / denom;
}

Vector y_update(const AdmmState& state, const BlockProblem& problem) {
  const ConstraintResidual res = primal_residual(state, problem);
  return state.y + state.rho * res.value;
}

InnerResiduals inner_residuals(const AdmmState& prev, const AdmmState& next,
                               const BlockProblem& problem) {
  check_state_shapes(next, problem);
  const Vector u = problem.b_mat() * (next.x_bar - prev.x_bar) +
                   (next.z - prev.z);
  double eps1_sq = 0.0;
  for (int i = 0; i < problem.num_blocks(); ++i) {
    eps1_sq += (problem.a(i).transpose() * u).squaredNorm();
  }
  InnerResiduals out;
  out.eps1 = next.rho * std::sqrt(eps1_sq);
  out.eps2 = next.rho * (problem.b_mat().transpose() * (next.z - prev.z)).norm();
  out.eps3 = primal_residual(next, problem).norm;
  return out;
}

void outer_update(AdmmState& state, const OuterConfig& config) {
  const int m = static_cast<int>(state.z.size());
  const Vector lo = resolve_bound(config.lambda_lo, m, -config.lambda_bound);
  const Vector hi = resolve_bound(config.lambda_hi, m, config.lambda_bound);
  const double z_norm = state.z.norm();
  state.lambda =
      (state.lambda + state.beta * state.z).cwiseMax(lo).cwiseMin(hi);
  if (z_norm > config.omega * state.z_norm_prev_outer) {
    state.beta *= config.gamma;
  }
  state.rho = 2.0 * state.beta;
  state.z_norm_prev_outer = z_norm;
  state.y = -(state.lambda + state.beta * state.z);
  state.k += 1;
  state.r = 0;
}

AdmmState make_initial_state(const BlockProblem& problem,
                             const OuterConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](int len) {
    Vector v(len);
    for (int i = 0; i < len; ++i) v(i) = unit(rng);
    return v;
  };
  const int m = problem.constraint_rows();
  AdmmState state;
  state.x.reserve(problem.num_blocks());
  for (int i = 0; i < problem.num_blocks(); ++i) {
    state.x.push_back(draw(problem.block_dim(i)));
  }
  state.x_bar = draw(problem.shared_dim());
  state.z = draw(m);
  const Vector lo = resolve_bound(config.lambda_lo, m, -config.lambda_bound);
  const Vector hi = resolve_bound(config.lambda_hi, m, config.lambda_bound);
  state.lambda = draw(m).cwiseMax(lo).cwiseMin(hi);
  state.beta = config.beta1;
  state.rho = 2.0 * config.beta1;
  state.y = -(state.lambda + state.beta * state.z);
  state.k = 1;
  state.r = 0;
  state.z_norm_prev_outer = state.z.norm();
  return state;
}

AdmmSolver::AdmmSolver(BlockProblem problem, OuterConfig config,
                       ToleranceSchedule schedule)
    : problem_(std::move(problem)),
      config_(std::move(config)),
      schedule_(schedule) {
  config_.validate();
  schedule_.validate();
  if (!problem_.has_shared() && problem_.shared_dim() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(problem_.b_mat());
    if (qr.rank() < problem_.shared_dim()) {
      throw InputError("AdmmSolver: B must have full column rank when g == 0");
    }
  }
  memos_.reserve(problem_.num_blocks());
  for (int i = 0; i < problem_.num_blocks(); ++i) {
    memos_.push_back(std::make_shared<EvalMemo>(
        [this, i](const Vector& x) { return problem_.evaluate_block(i, x); }));
    warm_radius_.push_back(
        std::min(config_.smooth.delta_max, 1.0));
  }
  started_ = std::chrono::steady_clock::now();
}

double AdmmSolver::cached_lagrangian(const AdmmState& state) const {
  double total = 0.0;
  for (int i = 0; i < problem_.num_blocks(); ++i) {
    total += memos_[i]->value(state.x[i]);
  }
  total += problem_.shared_value(state.x_bar);
  const ConstraintResidual res = primal_residual(state, problem_);
  total += state.y.dot(res.value) + 0.5 * state.rho * res.value.squaredNorm();
  total += state.lambda.dot(state.z) + 0.5 * state.beta * state.z.squaredNorm();
  return total;
}

AdmmSolver::BlockSolveOutcome AdmmSolver::solve_block(
    int i, const Vector& coupled_without_i, const AdmmState& state,
    double eps4_kr) {
  Vector w = coupled_without_i + problem_.b_mat() * state.x_bar + state.z +
             state.y / state.rho - problem_.b_vec();
  BlockOracle oracle(*memos_[i], problem_.a(i), std::move(w), state.rho);

  const double delta0 =
      std::min(warm_radius_[i], config_.smooth.delta_max);
  TrResult res;
  if (problem_.hint(i) == Smoothness::kSmooth) {
    res = solve_smooth(oracle, state.x[i], delta0, eps4_kr, config_.smooth);
  } else {
    NonsmoothTrConfig cfg = config_.nonsmooth;
    cfg.rng_seed = mix_seed(config_.nonsmooth.rng_seed ^ config_.seed,
                            static_cast<std::uint64_t>(i), state.k, state.r);
    res = solve_nonsmooth(oracle, state.x[i], delta0, eps4_kr, cfg);
  }
  warm_radius_[i] = std::min(
      config_.smooth.delta_max,
      std::max(res.delta_final * config_.warm_radius_factor,
               config_.warm_radius_floor));
  return {res.x, res.delta_final};
}

AdmmSolver::SweepOutcome AdmmSolver::sweep(AdmmState& state, double eps4_kr) {
  check_state_shapes(state, problem_);
  const int num_blocks = problem_.num_blocks();
  int threads = config_.threads > 0
                    ? config_.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);

  const AdmmState prev = state;
  double delta_blocks = 0.0;

  if (config_.mode == ParallelMode::kJacobi) {
    Vector total = coupled_sum(prev, problem_);
    std::vector<BlockSolveOutcome> results(num_blocks);
    for (int base = 0; base < num_blocks; base += threads) {
      const int hi = std::min(num_blocks, base + threads);
      std::vector<std::future<BlockSolveOutcome>> batch;
      batch.reserve(hi - base);
      for (int i = base; i < hi; ++i) {
        batch.push_back(std::async(std::launch::async, [&, i] {
          const Vector without_i = total - problem_.a(i) * prev.x[i];
          return solve_block(i, without_i, prev, eps4_kr);
        }));
      }
      for (int i = base; i < hi; ++i) {
        results[i] = batch[i - base].get();
      }
    }
    for (int i = 0; i < num_blocks; ++i) {
      state.x[i] = results[i].x;
      delta_blocks = std::max(delta_blocks, results[i].delta_final);
    }
  } else {
    Vector total = coupled_sum(state, problem_);
    for (int i = 0; i < num_blocks; ++i) {
      const Vector without_i = total - problem_.a(i) * state.x[i];
      AdmmState view = prev;
      view.x = state.x;
      BlockSolveOutcome res = solve_block(i, without_i, view, eps4_kr);
      total = without_i + problem_.a(i) * res.x;
      state.x[i] = res.x;
      delta_blocks = std::max(delta_blocks, res.delta_final);
    }
  }

  state.x_bar = xbar_update(state, problem_);
  state.z = z_update(state, problem_);
  state.y = y_update(state, problem_);
  check_dual_identity(state);

  SweepOutcome out;
  out.residuals = inner_residuals(prev, state, problem_);
  out.max_block_radius = delta_blocks;
  state.r += 1;

  trace_.rows.push_back({state.k, state.r - 1, cached_lagrangian(state),
                         out.residuals.eps1, out.residuals.eps2,
                         out.residuals.eps3, eps4_kr, state.z.norm(),
                         state.beta, problem_.max_eval_count(),
                         elapsed_ms(started_)});
  return out;
}

InnerResiduals AdmmSolver::inner_loop(AdmmState& state) {
  check_state_shapes(state, problem_);
  check_dual_identity(state);
  const OuterTolerances tol = tolerance_at(schedule_, state.k);

  double eps1_prev = tol.eps1_k;
  double tighten = 1.0;
  bool tightened_once = false;
  std::vector<double> residual_history;

  for (int iter = 0; iter < config_.max_inner; ++iter) {
    const double eps4_kr =
        tighten * inner_radius_tolerance(schedule_, eps1_prev, tol.eps4_k);
    const SweepOutcome outcome = sweep(state, eps4_kr);
    const InnerResiduals& res = outcome.residuals;

    if (res.eps1 <= tol.eps1_k && res.eps2 <= tol.eps2_k &&
        res.eps3 <= tol.eps3_k && outcome.max_block_radius <= tol.eps4_k) {
      return res;
    }

    // Stall guard: if residuals stop shrinking over a 50-sweep window,
    // tighten the block radius tolerance once, then give up.
    const double score = std::max({res.eps1, res.eps2, res.eps3});
    residual_history.push_back(score);
    const std::size_t window = 50;
    if (residual_history.size() > window) {
      const double old = residual_history[residual_history.size() - 1 - window];
      if (score > 0.999 * old) {
        if (!tightened_once) {
          tightened_once = true;
          tighten = 0.5;
        } else {
          std::ostringstream msg;
          msg << "inner_loop stalled at k=" << state.k << " r=" << iter
              << " eps1=" << res.eps1 << " eps2=" << res.eps2
              << " eps3=" << res.eps3 << " (tolerances " << tol.eps1_k << ", "
              << tol.eps2_k << ", " << tol.eps3_k << ")";
          throw StallError(msg.str());
        }
      }
    }
    eps1_prev = res.eps1;
  }
  std::ostringstream msg;
  msg << "inner_loop exceeded " << config_.max_inner << " sweeps at k="
      << state.k;
  throw StallError(msg.str());
}

SolveReport AdmmSolver::solve() {
  started_ = std::chrono::steady_clock::now();
  trace_.rows.clear();

  AdmmState state = make_initial_state(problem_, config_);
  SolveReport report;
  bool converged = false;
  InnerResiduals last{};

  while (true) {
    last = inner_loop(state);
    const OuterTolerances tol = tolerance_at(schedule_, state.k);
    const bool floors_reached =
        tol.eps1_k <= schedule_.eps1 * (1.0 + 1e-12) &&
        tol.eps2_k <= schedule_.eps2 * (1.0 + 1e-12) &&
        tol.eps4_k <= schedule_.eps4 * (1.0 + 1e-12);
    if (floors_reached && state.z.norm() <= schedule_.eps3) {
      converged = true;
      break;
    }
    if (state.k >= config_.max_outer) break;
    outer_update(state, config_);
  }

  report.converged = converged;
  report.final_residuals = last;
  report.objective = 0.0;
  for (int i = 0; i < problem_.num_blocks(); ++i) {
    report.objective += memos_[i]->value(state.x[i]);
  }
  report.objective += problem_.shared_value(state.x_bar);
  report.state = std::move(state);
  report.trace = trace_;
  report.wall_s = elapsed_ms(started_) / 1000.0;
  report.total_evals = problem_.total_eval_count();
  report.max_block_evals = problem_.max_eval_count();
  return report;
}

}  // namespace admmdfo
