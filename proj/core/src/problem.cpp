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

#include "admmdfo/problem.hpp"

#include <algorithm>
#include <cmath>

namespace admmdfo {

namespace {

bool same_or_both_nan(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

BlockProblem::BlockProblem(std::vector<LocalObjective> blocks,
                           std::vector<Matrix> a, Matrix b_mat, Vector b_vec,
                           std::vector<Smoothness> hints,
                           std::optional<SharedObjective> shared)
    : blocks_(std::move(blocks)),
      a_(std::move(a)),
      b_mat_(std::move(b_mat)),
      b_vec_(std::move(b_vec)),
      hints_(std::move(hints)),
      shared_(std::move(shared)) {
  if (blocks_.empty()) throw InputError("BlockProblem: needs at least one block");
  if (a_.size() != blocks_.size() || hints_.size() != blocks_.size()) {
    throw InputError("BlockProblem: per-block lists have mismatched lengths");
  }
  const Eigen::Index m = b_vec_.size();
  if (b_mat_.rows() != m) {
    throw InputError("BlockProblem: B row count differs from length of b");
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i].rows() != m) {
      throw InputError("BlockProblem: A_i row count differs from length of b");
    }
    if (a_[i].cols() != blocks_[i].dim()) {
      throw InputError("BlockProblem: A_i column count differs from block dim");
    }
    if (!all_finite(a_[i])) throw InputError("BlockProblem: non-finite A_i");
  }
  if (!all_finite(b_mat_) || !all_finite(b_vec_)) {
    throw InputError("BlockProblem: non-finite constraint data");
  }
  if (shared_) {
    if (shared_->dim != b_mat_.cols()) {
      throw InputError("BlockProblem: shared dim differs from B columns");
    }
    if (!shared_->value || !shared_->closed_form_minimizer) {
      throw InputError("BlockProblem: shared term missing callbacks");
    }
  }
  // Stochastic oracles break trust-region acceptance; probe each block twice
  // at a fixed point and reject on mismatch.
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Vector probe = Vector::Zero(blocks_[i].dim());
    if (!same_or_both_nan(blocks_[i].raw(probe), blocks_[i].raw(probe))) {
      throw InputError("BlockProblem: oracle is not deterministic");
    }
  }
}

double BlockProblem::evaluate_block(int i, const Vector& x_i) const {
  if (i < 0 || i >= num_blocks()) throw InputError("evaluate_block: bad index");
  return blocks_[i].evaluate(x_i);
}

double BlockProblem::shared_value(const Vector& x_bar) const {
  if (x_bar.size() != shared_dim()) {
    throw InputError("shared_value: wrong dimension");
  }
  if (!shared_) return 0.0;
  return shared_->value(x_bar);
}

long BlockProblem::max_eval_count() const {
  long best = 0;
  for (const auto& b : blocks_) best = std::max(best, b.eval_count());
  return best;
}

long BlockProblem::total_eval_count() const {
  long total = 0;
  for (const auto& b : blocks_) total += b.eval_count();
  return total;
}

Vector coupled_sum(const AdmmState& state, const BlockProblem& problem) {
  if (static_cast<int>(state.x.size()) != problem.num_blocks()) {
    throw InputError("coupled_sum: state block count mismatch");
  }
  Vector acc = Vector::Zero(problem.constraint_rows());
  for (int i = 0; i < problem.num_blocks(); ++i) {
    if (state.x[i].size() != problem.block_dim(i)) {
      throw InputError("coupled_sum: block dimension mismatch");
    }
    acc.noalias() += problem.a(i) * state.x[i];
  }
  return acc;
}

ConstraintResidual primal_residual(const AdmmState& state,
                                   const BlockProblem& problem) {
  if (state.x_bar.size() != problem.shared_dim() ||
      state.z.size() != problem.constraint_rows()) {
    throw InputError("primal_residual: state dimension mismatch");
  }
  ConstraintResidual out;
  out.value = coupled_sum(state, problem) + problem.b_mat() * state.x_bar +
              state.z - problem.b_vec();
  out.norm = out.value.norm();
  return out;
}

double augmented_lagrangian(const AdmmState& state,
                            const BlockProblem& problem) {
  const ConstraintResidual res = primal_residual(state, problem);
  if (state.y.size() != res.value.size() ||
      state.lambda.size() != state.z.size()) {
    throw InputError("augmented_lagrangian: dual dimension mismatch");
  }
  double total = 0.0;
  for (int i = 0; i < problem.num_blocks(); ++i) {
    total += problem.evaluate_block(i, state.x[i]);
  }
  total += problem.shared_value(state.x_bar);
  total += state.y.dot(res.value);
  total += 0.5 * state.rho * res.value.squaredNorm();
  total += state.lambda.dot(state.z);
  total += 0.5 * state.beta * state.z.squaredNorm();
  if (!std::isfinite(total)) {
    throw NumericError("augmented_lagrangian: non-finite value");
  }
  return total;
}

}  // namespace admmdfo
