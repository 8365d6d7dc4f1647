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

#include "admmdfo/tr_smooth.hpp"

#include <cmath>
#include <random>

#include "admmdfo/instances.hpp"
#include "doctest.h"

using namespace admmdfo;

namespace {

std::mt19937_64 rng(31415);

Vector random_vector(int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

SmoothTrConfig defaults() { return SmoothTrConfig{}; }

}  // namespace

TEST_CASE("build_fully_linear reproduces quadratics exactly") {
  FunctionOracle oracle([](const Vector& x) { return x.squaredNorm(); });
  Vector center(2);
  center << 0.3, -0.2;
  const SurrogateModel m = build_fully_linear(oracle, center, 0.5, defaults());
  CHECK(m.certified);
  CHECK((m.h - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-9);
  CHECK((m.g - 2.0 * center).norm() <= 1e-9);
  CHECK(m.value(center) == doctest::Approx(center.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("build_fully_linear on a linear oracle has a vanishing Hessian") {
  Vector c(3);
  c << 1.0, -2.0, 0.5;
  FunctionOracle oracle([c](const Vector& x) { return c.dot(x); });
  const SurrogateModel m =
      build_fully_linear(oracle, Vector::Zero(3), 0.7, defaults());
  CHECK(m.h.norm() <= 1e-8);
  CHECK((m.g - c).norm() <= 1e-8);
}

TEST_CASE("measured gradient-error constant stays under 10 for exp(x1)") {
  double kappa_eg = 0.0;
  const double radius = 0.1;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector center = random_vector(2);
    FunctionOracle oracle([](const Vector& x) { return std::exp(x(0)); });
    const SurrogateModel m =
        build_fully_linear(oracle, center, radius, defaults());
    // finite-difference reference gradient
    Vector ref(2);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Vector e = Vector::Zero(2);
      e(i) = h;
      ref(i) = (std::exp((center + e)(0)) - std::exp((center - e)(0))) / (2 * h);
    }
    kappa_eg = std::max(kappa_eg, (m.g - ref).norm() / radius);
  }
  CHECK(kappa_eg <= 10.0);
}

TEST_CASE("criticality_step leaves large-gradient incumbents alone") {
  FunctionOracle oracle([](const Vector& x) { return x.squaredNorm(); });
  SmoothTrConfig cfg = defaults();
  cfg.eps_c = 0.1;
  SurrogateModel m = build_fully_linear(oracle, Vector::Ones(2), 1.0, cfg);
  REQUIRE(m.g.norm() > cfg.eps_c);
  auto [out, delta] = criticality_step(m, 1.0, 1e-8, oracle, cfg);
  CHECK(delta == 1.0);
  CHECK((out.g - m.g).norm() == 0.0);
}

TEST_CASE("criticality_step contracts to the stop radius at a stationary center") {
  Vector hat = Vector::Zero(2);
  FunctionOracle oracle([hat](const Vector& x) { return (x - hat).squaredNorm(); });
  SmoothTrConfig cfg = defaults();
  const double stop = 1e-6;
  SurrogateModel m = build_fully_linear(oracle, hat, 1.0, cfg);
  auto [out, delta] = criticality_step(m, 1.0, stop, oracle, cfg);
  CHECK(delta <= stop);
}

TEST_CASE("criticality_step contraction loop matches the hand simulation") {
  // ||x||^2 at center (0.01, 0): exact models give g = (0.02, 0), and the
  // loop contracts 1, 1/2, ..., 2^-6 <= mu*||g||.
  Vector center(2);
  center << 0.01, 0.0;
  FunctionOracle oracle([](const Vector& x) { return x.squaredNorm(); });
  SmoothTrConfig cfg = defaults();
  cfg.eps_c = 0.1;  // the gradient (0.02) must trip the criticality branch
  cfg.mu = 1.0;
  cfg.tau = 0.5;
  cfg.alpha = 0.5;
  SurrogateModel m = build_fully_linear(oracle, center, 1.0, cfg);
  auto [out, delta] = criticality_step(m, 1.0, 1e-9, oracle, cfg);
  CHECK((out.g - 2.0 * center).norm() <= 1e-6);
  CHECK(delta == doctest::Approx(std::pow(0.5, 6)).epsilon(1e-9));
  CHECK(delta <= cfg.mu * out.g.norm() + 1e-12);
  CHECK(delta >= cfg.tau * out.g.norm() - 1e-12);
}

TEST_CASE("compute_step: interior Newton point") {
  SurrogateModel m;
  m.center = Vector::Zero(2);
  m.f_center = 0.0;
  m.g = Vector(2);
  m.g << 1, 0;
  m.h = Matrix::Identity(2, 2);
  const Vector s = compute_step(m, 10.0, defaults());
  Vector expected(2);
  expected << -1, 0;
  CHECK((s - expected).norm() <= 1e-9);
  const double decrease = m.value(m.center) - m.value(m.center + s);
  CHECK(decrease == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("compute_step: boundary Cauchy step for a linear model") {
  SurrogateModel m;
  m.center = Vector::Zero(2);
  m.g = Vector(2);
  m.g << 3, 4;
  m.h = Matrix::Zero(2, 2);
  const Vector s = compute_step(m, 1.0, defaults());
  Vector expected(2);
  expected << -0.6, -0.8;
  CHECK((s - expected).norm() <= 1e-9);
  CHECK(m.value(m.center) - m.value(m.center + s) ==
        doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("compute_step beats the Cauchy point under indefinite curvature") {
  SurrogateModel m;
  m.center = Vector::Zero(2);
  m.g = Vector(2);
  m.g << 1, 0;
  m.h = Matrix::Zero(2, 2);
  m.h(0, 0) = 1;
  m.h(1, 1) = -2;
  const Vector s = compute_step(m, 1.0, defaults());
  // Cauchy point: minimize along -g within the ball.
  double best_cauchy = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1000.0;
    Vector c = -t * m.g;
    best_cauchy = std::min(best_cauchy, m.value(m.center + c));
  }
  CHECK(m.value(m.center + s) <= best_cauchy + 1e-12);
  // Dense sampling bound on the model minimum over the ball.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double sampled = best_cauchy;
  for (int it = 0; it < 20000; ++it) {
    Vector c(2);
    c << u(rng), u(rng);
    if (c.norm() > 1.0) continue;
    sampled = std::min(sampled, m.value(m.center + c));
  }
  CHECK(m.value(m.center + s) <= sampled + 1e-4);
}

TEST_CASE("solve_smooth finds the minimizer of a shifted quadratic") {
  Vector hat(3);
  hat << 0.4, -1.2, 2.0;
  FunctionOracle oracle([hat](const Vector& x) { return (x - hat).squaredNorm(); });
  const TrResult res =
      solve_smooth(oracle, Vector::Zero(3), 1.0, 1e-6, defaults());
  CHECK((res.x - hat).norm() <= 1e-4);
  CHECK(res.delta_final <= 1e-6);
}

TEST_CASE("solve_smooth at a stationary start stays put") {
  FunctionOracle oracle([](const Vector& x) { return 3.0 + x.squaredNorm(); });
  const TrResult res =
      solve_smooth(oracle, Vector::Zero(2), 1.0, 1e-5, defaults());
  CHECK(res.x.norm() <= 1e-6);
  CHECK(res.f == doctest::Approx(3.0));
}

TEST_CASE("solve_smooth trace: monotone best value and unit model ratios") {
  Vector hat(2);
  hat << 5.0, -3.0;
  FunctionOracle oracle([hat](const Vector& x) { return (x - hat).squaredNorm(); });
  const TrResult res =
      solve_smooth(oracle, Vector::Zero(2), 0.5, 1e-5, defaults());
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].f <= res.trace[i - 1].f + 1e-12);
  }
  // With full interpolation sets on a quadratic, the model is exact and every
  // evaluated ratio is 1.
  for (const auto& row : res.trace) {
    if (std::isfinite(row.rho)) {
      CHECK(row.rho == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("radius grows by gamma_inc on successful quadratic steps") {
  Vector hat = Vector::Constant(2, 100.0);
  FunctionOracle oracle([hat](const Vector& x) { return (x - hat).squaredNorm(); });
  SmoothTrConfig cfg = defaults();
  cfg.delta_max = 64.0;
  const TrResult res = solve_smooth(oracle, Vector::Zero(2), 1.0, 1e-5, cfg);
  // Far from the minimizer every step is successful; the used radius should
  // double until delta_max.
  REQUIRE(res.trace.size() >= 3);
  for (std::size_t i = 1; i + 1 < res.trace.size(); ++i) {
    const double prev = res.trace[i - 1].delta;
    const double cur = res.trace[i].delta;
    if (res.trace[i - 1].rho >= cfg.eta1 && cur > prev) {
      CHECK(cur == doctest::Approx(std::min(cfg.gamma_inc * prev,
                                            cfg.delta_max)));
    }
  }
}

TEST_CASE("gradient-radius bound on random convex quadratics") {
  // C1 from the criticality constants with the measured kappa_eg ceiling.
  const double kappa_eg = 10.0;
  SmoothTrConfig cfg = defaults();
  const double c1 = std::max((1.0 + kappa_eg * cfg.mu) / cfg.tau,
                             kappa_eg + 1.0 / cfg.mu);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
    const Matrix q = a.transpose() * a + Matrix::Identity(n, n);
    const Vector hat = random_vector(n);
    FunctionOracle oracle([q, hat](const Vector& x) {
      return 0.5 * (x - hat).dot(q * (x - hat));
    });
    const TrResult res =
        solve_smooth(oracle, Vector::Zero(n), 1.0, 1e-5, cfg);
    const Vector grad = q * (res.x - hat);
    CHECK(grad.norm() <= c1 * res.delta_final + 1e-12);
    CHECK(res.delta_final <= 1e-5);
  }
}

TEST_CASE("solve_smooth on an ARWHEAD block subproblem obeys the bound") {
  // f_block(x) + rho/2 ||A x + w||^2 with a mid-run-style coupling vector.
  auto dec = decompose_arwhead(9);
  const Matrix a = dec.problem.a(0);
  Vector w(2);
  w << 0.37, -0.19;
  const double rho = 40.0;
  auto block_obj = [&dec, &a, &w, rho](const Vector& x) {
    return dec.problem.raw_block(0, x) + 0.5 * rho * (a * x + w).squaredNorm();
  };
  FunctionOracle oracle(block_obj);
  SmoothTrConfig cfg = defaults();
  const TrResult res =
      solve_smooth(oracle, Vector::Constant(5, 0.5), 1.0, 1e-5, cfg);
  // Analytic gradient of the block objective.
  Vector grad(5);
  const double v = res.x(4);
  grad.setZero();
  double dv = 0.0;
  for (int t = 0; t < 4; ++t) {
    const double q = res.x(t) * res.x(t) + v * v;
    grad(t) = 4.0 * res.x(t) * q - 4.0;
    dv += 4.0 * v * q;
  }
  grad(4) = dv;
  grad += rho * a.transpose() * (a * res.x + w);
  const double kappa_eg = 10.0;
  const double c1 = std::max((1.0 + kappa_eg * cfg.mu) / cfg.tau,
                             kappa_eg + 1.0 / cfg.mu);
  CHECK(grad.norm() <= c1 * res.delta_final + 1e-10);
}
