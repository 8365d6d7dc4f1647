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

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "admmdfo/linalg.hpp"

namespace admmdfo {

enum class Smoothness { kSmooth, kNonsmooth };

// A counted black-box oracle for one block. Copies share the counter, so a
// BlockProblem can be passed around by value while counts stay global.
class LocalObjective {
 public:
  LocalObjective(int dim, std::function<double(const Vector&)> fn)
      : dim_(dim),
        fn_(std::move(fn)),
        count_(std::make_shared<std::atomic<long>>(0)) {
    if (dim_ < 1) throw InputError("LocalObjective: dim must be >= 1");
    if (!fn_) throw InputError("LocalObjective: null oracle");
  }

  int dim() const { return dim_; }

  double evaluate(const Vector& x) const {
    if (x.size() != dim_) {
      throw InputError("LocalObjective: point has wrong dimension");
    }
    const double v = fn_(x);
    count_->fetch_add(1, std::memory_order_relaxed);
    if (!std::isfinite(v)) {
      throw OracleError("LocalObjective: oracle returned non-finite value", x);
    }
    return v;
  }

  // Uncounted access, used only for the construction-time determinism probe.
  double raw(const Vector& x) const { return fn_(x); }

  long eval_count() const { return count_->load(std::memory_order_relaxed); }

 private:
  int dim_;
  std::function<double(const Vector&)> fn_;
  std::shared_ptr<std::atomic<long>> count_;
};

// Shared term g with its closed-form partial minimizer
//   G(B, v, rho) = argmin_xbar g(xbar) + (rho/2) ||v + B xbar||^2.
struct SharedObjective {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Matrix& b_mat, const Vector& v, double rho)>
      closed_form_minimizer;
};

struct ConstraintResidual {
  Vector value;
  double norm = 0.0;
};

// Block-separable problem
//   min sum_i f_i(x_i) + g(xbar)  s.t.  sum_i A_i x_i + B xbar = b.
// Immutable after construction; evaluation counters are atomic.
class BlockProblem {
 public:
  BlockProblem(std::vector<LocalObjective> blocks, std::vector<Matrix> a,
               Matrix b_mat, Vector b_vec, std::vector<Smoothness> hints,
               std::optional<SharedObjective> shared = std::nullopt);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_dim(int i) const { return blocks_[i].dim(); }
  int constraint_rows() const { return static_cast<int>(b_vec_.size()); }
  int shared_dim() const { return static_cast<int>(b_mat_.cols()); }

  const Matrix& a(int i) const { return a_[i]; }
  const Matrix& b_mat() const { return b_mat_; }
  const Vector& b_vec() const { return b_vec_; }
  Smoothness hint(int i) const { return hints_[i]; }
  bool has_shared() const { return shared_.has_value(); }
  const SharedObjective& shared() const { return *shared_; }

  double evaluate_block(int i, const Vector& x_i) const;
  double shared_value(const Vector& x_bar) const;

  long eval_count(int i) const { return blocks_[i].eval_count(); }
  long max_eval_count() const;
  long total_eval_count() const;

  // Uncounted oracle access for internal memo layers.
  double raw_block(int i, const Vector& x_i) const {
    return blocks_[i].raw(x_i);
  }

 private:
  std::vector<LocalObjective> blocks_;
  std::vector<Matrix> a_;
  Matrix b_mat_;
  Vector b_vec_;
  std::vector<Smoothness> hints_;
  std::optional<SharedObjective> shared_;
};

// Concatenated two-level iterate: block primals, shared primal, slack, inner
// dual y, outer dual lambda, penalties, and loop counters.
struct AdmmState {
  std::vector<Vector> x;
  Vector x_bar;
  Vector z;
  Vector y;
  Vector lambda;
  double beta = 0.0;
  double rho = 0.0;  // kept equal to 2 * beta
  int k = 1;
  int r = 0;
  double z_norm_prev_outer = 0.0;
};

// sum_i A_i x_i  (shape checks included).
Vector coupled_sum(const AdmmState& state, const BlockProblem& problem);

// sum_i A_i x_i + B xbar + z - b and its Euclidean norm.
ConstraintResidual primal_residual(const AdmmState& state,
                                   const BlockProblem& problem);

// f(x) + g(xbar) + y'(Ax + B xbar + z - b) + rho/2 ||Ax + B xbar + z - b||^2
//      + lambda' z + beta/2 ||z||^2.
// Calls the block oracles (counted).
double augmented_lagrangian(const AdmmState& state,
                            const BlockProblem& problem);

}  // namespace admmdfo
