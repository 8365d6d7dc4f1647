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

#include "admmdfo/instances.hpp"

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

using namespace admmdfo;

namespace {

std::mt19937_64 rng(2024);

Vector random_vector(int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

const std::string kDataPath = std::string(ADMMDFO_DATA_DIR) + "/banknote.csv";

}  // namespace

TEST_CASE("arwhead_eval known values") {
  Vector star(10);
  star.setOnes();
  star(9) = 0.0;
  CHECK(arwhead_eval(star) == doctest::Approx(0.0));
  CHECK(arwhead_eval(Vector::Zero(10)) == doctest::Approx(27.0));
  Vector two(2);
  two << 2.0, 0.0;
  CHECK(arwhead_eval(two) == doctest::Approx(11.0));
}

TEST_CASE("rosenbrock_eval known values") {
  CHECK(rosenbrock_eval(Vector::Ones(10)) == doctest::Approx(0.0));
  CHECK(rosenbrock_eval(Vector::Zero(10)) == doctest::Approx(9.0));
  Vector v(2);
  v << -1.0, 1.0;
  CHECK(rosenbrock_eval(v) == doctest::Approx(4.0));
}

TEST_CASE("decompose_arwhead shapes: N=9 gives two (4+1)-blocks, m=2") {
  auto dec = decompose_arwhead(9);
  CHECK(dec.problem.num_blocks() == 2);
  CHECK(dec.problem.block_dim(0) == 5);
  CHECK(dec.problem.block_dim(1) == 5);
  CHECK(dec.problem.constraint_rows() == 2);
  CHECK(dec.problem.shared_dim() == 1);
  CHECK_THROWS_AS(decompose_arwhead(1), InputError);
}

TEST_CASE("arwhead reassembly identity and full row rank") {
  for (int n : {9, 10, 17, 50}) {
    auto dec = decompose_arwhead(n);
    const Vector u = random_vector(n, 0.0, 1.0);
    std::vector<Vector> x;
    double block_sum = 0.0;
    for (int i = 0; i < dec.problem.num_blocks(); ++i) {
      const int d = dec.problem.block_dim(i);
      Vector xi(d);
      for (int t = 0; t < d - 1; ++t) xi(t) = u(4 * i + t);
      xi(d - 1) = u(n - 1);  // the consensus copy
      block_sum += dec.problem.evaluate_block(i, xi);
      x.push_back(xi);
    }
    CHECK(block_sum == doctest::Approx(arwhead_eval(u)).epsilon(1e-12));
    Vector xbar(1);
    xbar << u(n - 1);
    CHECK((dec.assemble(x, xbar) - u).norm() == 0.0);

    // [A B] has full row rank.
    const int m = dec.problem.constraint_rows();
    Matrix full(m, 0);
    for (int i = 0; i < dec.problem.num_blocks(); ++i) {
      Matrix next(m, full.cols() + dec.problem.a(i).cols());
      next << full, dec.problem.a(i);
      full = next;
    }
    Matrix withb(m, full.cols() + dec.problem.b_mat().cols());
    withb << full, dec.problem.b_mat();
    CHECK(Eigen::ColPivHouseholderQR<Matrix>(withb).rank() == m);
  }
}

TEST_CASE("decompose_rosenbrock shapes: N=7 overlaps once, N=10 three blocks") {
  auto d7 = decompose_rosenbrock(7);
  CHECK(d7.problem.num_blocks() == 2);
  CHECK(d7.problem.block_dim(0) == 4);
  CHECK(d7.problem.block_dim(1) == 4);
  CHECK(d7.problem.shared_dim() == 1);
  CHECK(d7.problem.constraint_rows() == 2);

  auto d10 = decompose_rosenbrock(10);
  CHECK(d10.problem.num_blocks() == 3);
  CHECK(d10.problem.shared_dim() == 2);
  CHECK(d10.problem.constraint_rows() == 4);

  auto d4 = decompose_rosenbrock(4);  // single block, no constraints
  CHECK(d4.problem.num_blocks() == 1);
  CHECK(d4.problem.constraint_rows() == 0);
}

TEST_CASE("rosenbrock reassembly identity on consensus points") {
  for (int n : {7, 10, 11, 23}) {
    auto dec = decompose_rosenbrock(n);
    const Vector u = random_vector(n);
    std::vector<Vector> x;
    double block_sum = 0.0;
    for (int w = 0; w < dec.problem.num_blocks(); ++w) {
      const int d = dec.problem.block_dim(w);
      Vector xw(d);
      for (int t = 0; t < d; ++t) xw(t) = u(3 * w + t);
      block_sum += dec.problem.evaluate_block(w, xw);
      x.push_back(xw);
    }
    CHECK(block_sum == doctest::Approx(rosenbrock_eval(u)).epsilon(1e-12));
    Vector xbar(dec.problem.shared_dim());
    for (int j = 0; j < xbar.size(); ++j) xbar(j) = u(3 * (j + 1));
    CHECK((dec.assemble(x, xbar) - u).norm() == 0.0);

    const int m = dec.problem.constraint_rows();
    if (m > 0) {
      Matrix full(m, 0);
      for (int i = 0; i < dec.problem.num_blocks(); ++i) {
        Matrix next(m, full.cols() + dec.problem.a(i).cols());
        next << full, dec.problem.a(i);
        full = next;
      }
      Matrix withb(m, full.cols() + dec.problem.b_mat().cols());
      withb << full, dec.problem.b_mat();
      CHECK(Eigen::ColPivHouseholderQR<Matrix>(withb).rank() == m);
    }
  }
}

TEST_CASE("nn_local_loss at zero weights and the decay-only probe") {
  AgentData data;
  data.features = Matrix::Zero(4, 100);
  data.labels = Vector::Ones(100);
  for (int j = 0; j < 100; ++j) {
    data.features.col(j) = random_vector(4);
    data.labels(j) = j % 3 == 0 ? -1.0 : 1.0;
  }
  CHECK(nn_local_loss(Vector::Zero(10), data, 0.0, 10) ==
        doctest::Approx(5.0).epsilon(1e-12));

  AgentData empty;
  empty.features = Matrix::Zero(4, 0);
  empty.labels = Vector(0);
  Vector w(10);
  w.setZero();
  w(0) = 4.0;
  w(8) = 2.0;  // ||x||^2 = 20
  CHECK(nn_local_loss(w, empty, 0.1, 10) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(nn_local_loss(Vector::Zero(7), empty, 0.1, 10), InputError);
}

TEST_CASE("nn_local_loss matches a matrix-form reference implementation") {
  AgentData data;
  const int ni = 17;
  data.features = Matrix(4, ni);
  data.labels = Vector(ni);
  for (int j = 0; j < ni; ++j) {
    data.features.col(j) = random_vector(4, -2.0, 2.0);
    data.labels(j) = (j % 2 == 0) ? 1.0 : -1.0;
  }
  const Vector x = random_vector(10);
  // Reference path: reshape into Z and w and use matrix ops.
  Matrix z(4, 2);
  z.col(0) = x.segment(0, 4);
  z.col(1) = x.segment(4, 4);
  const Vector w = x.segment(8, 2);
  double acc = 0.0;
  for (int j = 0; j < ni; ++j) {
    const Vector hidden =
        (z.transpose() * data.features.col(j)).cwiseMax(0.0);
    const double err = data.labels(j) - w.dot(hidden);
    acc += err * err;
  }
  const double decay = 0.07;
  const int agents = 10;
  const double expected =
      acc / (2.0 * agents) +
      decay * (z.squaredNorm() + w.squaredNorm()) / (2.0 * agents);
  CHECK(nn_local_loss(x, data, decay, agents) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("nn loss is invariant under hidden-unit permutation") {
  AgentData data;
  data.features = Matrix(4, 9);
  data.labels = Vector(9);
  for (int j = 0; j < 9; ++j) {
    data.features.col(j) = random_vector(4);
    data.labels(j) = j % 2 == 0 ? 1.0 : -1.0;
  }
  const Vector x = random_vector(10);
  Vector swapped(10);
  swapped.segment(0, 4) = x.segment(4, 4);
  swapped.segment(4, 4) = x.segment(0, 4);
  swapped(8) = x(9);
  swapped(9) = x(8);
  CHECK(nn_local_loss(x, data, 0.05, 10) ==
        doctest::Approx(nn_local_loss(swapped, data, 0.05, 10))
            .epsilon(1e-12));
}

TEST_CASE("load_banknote partitions, determinism, and label remap") {
  const BanknoteSplit split = load_banknote(kDataPath, 11);
  CHECK(split.agents.size() == 10);
  for (const auto& agent : split.agents) {
    CHECK(agent.labels.size() == 100);
    CHECK(agent.features.cols() == 100);
  }
  CHECK(split.val_labels.size() == 372);
  for (int j = 0; j < split.val_labels.size(); ++j) {
    const double l = split.val_labels(j);
    CHECK((l == 1.0 || l == -1.0));
  }

  const BanknoteSplit again = load_banknote(kDataPath, 11);
  CHECK((split.agents[3].features - again.agents[3].features).norm() == 0.0);
  CHECK((split.val_labels - again.val_labels).norm() == 0.0);

  // Disjoint and exhaustive: every row lands in exactly one partition.
  std::multiset<double> keys;
  auto key = [](const Vector& f) {
    return f(0) + 3.1 * f(1) + 9.7 * f(2) + 31.0 * f(3);
  };
  for (const auto& agent : split.agents) {
    for (int j = 0; j < agent.features.cols(); ++j) {
      keys.insert(key(agent.features.col(j)));
    }
  }
  for (int j = 0; j < split.val_features.cols(); ++j) {
    keys.insert(key(split.val_features.col(j)));
  }
  CHECK(keys.size() == 1372);
  std::set<double> uniq(keys.begin(), keys.end());
  CHECK(uniq.size() == 1372);
}

TEST_CASE("validation_accuracy: zero weights and a perfect separator") {
  Matrix feats(4, 4);
  Vector labels(4);
  feats.setZero();
  feats(0, 0) = 1.0;
  feats(0, 1) = 2.0;
  feats(0, 2) = -1.0;
  feats(0, 3) = -2.0;
  labels << 1.0, 1.0, -1.0, -1.0;

  // Zero weights: everything predicts +1 (sign(0) = +1).
  CHECK(validation_accuracy(Vector::Zero(10), feats, labels) ==
        doctest::Approx(0.5));

  // w' relu(Z'u) >= 0 always; use two mirrored units to separate by sign.
  Vector w(10);
  w.setZero();
  w(0) = 1.0;   // unit 1 reads +u(0)
  w(4) = -1.0;  // unit 2 reads -u(0)
  w(8) = 1.0;
  w(9) = -1.0;  // subtract the mirrored activation
  CHECK(validation_accuracy(w, feats, labels) == doctest::Approx(1.0));
}

TEST_CASE("make_banknote_consensus wires a 10-agent consensus problem") {
  const BanknoteSplit split = load_banknote(kDataPath, 3);
  auto dec = make_banknote_consensus(split, 0.01);
  CHECK(dec.problem.num_blocks() == 10);
  CHECK(dec.problem.block_dim(0) == 10);
  CHECK(dec.problem.constraint_rows() == 100);
  CHECK(dec.problem.shared_dim() == 10);
  CHECK(dec.problem.hint(0) == Smoothness::kNonsmooth);
  // Block value equals the direct loss.
  const Vector x = random_vector(10);
  CHECK(dec.problem.evaluate_block(2, x) ==
        doctest::Approx(nn_local_loss(x, split.agents[2], 0.01, 10)));
}

TEST_CASE("nelder_mead on a 1D quadratic") {
  const auto res = nelder_mead(
      [](const Vector& x) { return (x(0) - 2.0) * (x(0) - 2.0); },
      Vector::Zero(1), 1e-8, 100000);
  CHECK(res.reached_target);
  CHECK(std::abs(res.x(0) - 2.0) <= 1e-3);
  CHECK(res.evals <= 100000);
}
