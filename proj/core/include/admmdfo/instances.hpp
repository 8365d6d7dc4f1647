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
#include <string>
#include <vector>

#include "admmdfo/problem.hpp"

namespace admmdfo {

// sum_{i<N} [(u_i^2 + u_N^2)^2 - 4 u_i + 3]; minimum 0 at (1,...,1,0).
double arwhead_eval(const Vector& u);

// sum_{i<N} [100 (u_{i+1} - u_i^2)^2 + (1 - u_i)^2]; minimum 0 at (1,...,1).
double rosenbrock_eval(const Vector& u);

// A block decomposition together with the gluing back to the monolithic
// variable (consensus copies resolved from x_bar).
struct DecomposedProblem {
  BlockProblem problem;
  int n = 0;
  std::function<Vector(const std::vector<Vector>& x, const Vector& x_bar)>
      assemble;
  std::function<double(const Vector&)> monolithic;
};

// ceil((n-1)/4) blocks of up to four local coordinates plus a local copy of
// the shared last variable; consensus rows tie every copy to the scalar
// x_bar.
DecomposedProblem decompose_arwhead(int n);

// Overlapping index windows of width four and stride three; each overlap
// variable is duplicated into both adjacent blocks and x_bar stacks the
// overlaps, two consensus rows per overlap.
DecomposedProblem decompose_rosenbrock(int n);

struct AgentData {
  Matrix features;  // feature_dim x n_i
  Vector labels;    // entries in {-1, +1}
};

struct BanknoteSplit {
  std::vector<AgentData> agents;
  Matrix val_features;
  Vector val_labels;
};

// CSV rows "v1,v2,v3,v4,label" with label in {0,1} (remapped to {-1,+1}).
// Seeded shuffle; first 1000 rows become num_agents equal partitions, the
// remaining 372 the validation set. Unexpected row counts get a proportional
// split and a warning on stderr.
BanknoteSplit load_banknote(const std::string& path, std::uint64_t seed,
                            int num_agents = 10);

// Single-hidden-layer ReLU regression loss of one agent:
//   1/(2N) sum_j (y_j - w' max(0, Z' u_j))^2
//   + weight_decay/(2N) (||Z||_F^2 + ||w||^2),
// with x = [vec(Z); w] column-major, Z 4x2, w length 2, N = num_agents.
double nn_local_loss(const Vector& x, const AgentData& data,
                     double weight_decay, int num_agents);

// Fraction of samples with sign(w' max(0, Z' u)) equal to the label;
// sign(0) counts as +1.
double validation_accuracy(const Vector& weights, const Matrix& features,
                           const Vector& labels);

// Consensus problem over the agents' local losses: A_i = I slices, B = -I
// stacked, b = 0, nonsmooth blocks of dimension 10.
DecomposedProblem make_banknote_consensus(const BanknoteSplit& split,
                                          double weight_decay);

struct NelderMeadResult {
  Vector x;
  double f = 0.0;
  long evals = 0;
  bool reached_target = false;
};

// Monolithic simplex baseline with standard coefficients (1, 2, 0.5, 0.5);
// stops once the best vertex reaches `target` or the evaluation budget is
// spent.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& fn,
                             const Vector& x0, double target, long max_evals);

}  // namespace admmdfo
