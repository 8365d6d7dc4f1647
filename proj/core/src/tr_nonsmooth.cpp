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

#include "admmdfo/tr_nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "admmdfo/numerics.hpp"
#include "poly_basis.hpp"

namespace admmdfo {

namespace {

// Quadratic ridge regression on the sample window. The curvature is clipped
// per the radius-dependent growth bound; the fitted gradient comes along for
// free and seeds an informed bundle direction.
struct BundleFit {
  Matrix hess;
  Vector grad;  // zero when there are too few samples
};

BundleFit fit_bundle_model(const std::vector<std::pair<Vector, double>>& samples,
                           const Vector& center, double delta,
                           const NonsmoothTrConfig& config) {
  const int n = static_cast<int>(center.size());
  const double window = config.zeta_bar * delta;
  BundleFit fit{Matrix::Zero(n, n), Vector::Zero(n)};
  if (static_cast<int>(samples.size()) >= n + 2) {
    const int p = static_cast<int>(samples.size());
    Matrix phi(p, detail::full_basis(n));
    Vector v(p);
    for (int i = 0; i < p; ++i) {
      phi.row(i) = detail::basis_at((samples[i].first - center) / window)
                       .transpose();
      v(i) = samples[i].second;
    }
    const Vector coeffs = solve_least_squares_ridge(phi, v);
    const detail::QuadPoly poly = detail::unpack(coeffs, n);
    fit.hess = poly.h / (window * window);
    fit.grad = poly.g / window;
  }

  const double grow = std::pow(delta, -config.delta_exp);
  const double hi = config.curve_M * grow;
  const double lo = -config.curve_m * grow;
  const Matrix sym = 0.5 * (fit.hess + fit.hess.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  Vector lam = es.eigenvalues();
  if (lam.minCoeff() >= lo && lam.maxCoeff() <= hi) {
    fit.hess = sym;
    return fit;
  }
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam(i) = std::clamp(lam(i), lo, hi);
  }
  fit.hess =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return fit;
}

std::optional<QpSolution> try_solve_qp(const BundleModel& model,
                                       double delta) {
  QpProblem qp;
  qp.hessian = model.hess;
  qp.radius = delta;
  qp.cuts.reserve(model.directions.size());
  for (std::size_t i = 0; i < model.directions.size(); ++i) {
    qp.cuts.push_back({model.f_center - model.offsets[i], model.directions[i]});
  }
  try {
    return solve_tr_qp(qp);
  } catch (const QpFailure&) {
    return std::nullopt;
  }
}

}  // namespace

void NonsmoothTrConfig::validate() const {
  const bool ok = eta1_bar > 0.0 && theta_bar > 0.0 && eps_bar > 0.0 &&
                  zeta1_bar > 0.0 && zeta1_bar < 1.0 && zeta2_bar >= 1.0 &&
                  zeta_bar > 0.0 && p_bar > 0.0 && delta_exp > 0.0 &&
                  delta_exp < 0.5 && curve_m > 0.0 && curve_M > 0.0 &&
                  offset_delta >= 0.0 && max_directions >= 1 && max_iters >= 1;
  if (!ok) throw InputError("NonsmoothTrConfig: ordering constraints violated");
}

std::vector<double> compute_offsets(const BundleModel& model,
                                    double delta_param) {
  std::vector<double> offsets(model.directions.size(), 0.0);
  if (model.samples.empty()) return offsets;
  for (std::size_t i = 0; i < model.directions.size(); ++i) {
    double best = 0.0;
    for (const auto& [y, fy] : model.samples) {
      const Vector d = y - model.center;
      const double cut = model.f_center - fy + model.directions[i].dot(d) +
                         delta_param * d.squaredNorm();
      best = std::max(best, cut);
    }
    offsets[i] = best;
  }
  return offsets;
}

Vector aggregate_subgradient(const Vector& multipliers,
                             const std::vector<Vector>& directions) {
  if (multipliers.size() != static_cast<Eigen::Index>(directions.size())) {
    throw InputError("aggregate_subgradient: length mismatch");
  }
  if (directions.empty()) throw InputError("aggregate_subgradient: empty set");
  Vector acc = Vector::Zero(directions[0].size());
  for (std::size_t i = 0; i < directions.size(); ++i) {
    acc += multipliers(static_cast<Eigen::Index>(i)) * directions[i];
  }
  return acc;
}

TrResult solve_nonsmooth(Oracle& oracle, const Vector& x0, double delta0,
                         double stop_radius, const NonsmoothTrConfig& config) {
  config.validate();
  if (!(stop_radius > 0.0)) {
    throw InputError("solve_nonsmooth: stop_radius must be positive");
  }
  if (!(delta0 > 0.0)) throw InputError("solve_nonsmooth: delta0 <= 0");

  const int n = static_cast<int>(x0.size());
  TrResult out;
  out.x = x0;
  out.f = oracle(x0);
  double delta = delta0;

  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fresh_direction = [&]() {
    Vector g(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) g(i) = gauss(rng);
      norm = g.norm();
    } while (norm < 1e-12);
    return Vector(g / norm);
  };

  std::vector<Vector> directions;
  std::vector<double> last_multiplier;

  for (int q = 0; q < config.max_iters; ++q) {
    if (delta <= stop_radius) {
      out.delta_final = delta;
      return out;
    }

    const Vector g_new = fresh_direction();
    directions.push_back(g_new);
    last_multiplier.push_back(0.0);

    BundleModel model;
    model.center = out.x;
    model.f_center = out.f;
    model.samples = oracle.nearby(out.x, config.zeta_bar * delta);
    const BundleFit fit = fit_bundle_model(model.samples, out.x, delta, config);
    model.hess = fit.hess;
    // The regression gradient is a well-informed subgradient candidate on
    // smooth stretches; its offset neutralizes it where the fit is poor. The
    // fresh random direction above keeps the direction set dense.
    if (fit.grad.norm() > 1e-12) {
      directions.push_back(fit.grad / fit.grad.norm());
      last_multiplier.push_back(0.0);
    }
    while (static_cast<int>(directions.size()) >
           std::max(config.max_directions, 2)) {
      const auto it =
          std::min_element(last_multiplier.begin(), last_multiplier.end() - 1);
      const auto at = std::distance(last_multiplier.begin(), it);
      directions.erase(directions.begin() + at);
      last_multiplier.erase(it);
    }
    model.directions = directions;
    model.offsets = compute_offsets(model, config.offset_delta);

    bool reset = false;
    std::optional<QpSolution> sol = try_solve_qp(model, delta);
    if (sol) {
      const Vector agg =
          aggregate_subgradient(sol->multipliers, model.directions);
      if (agg.norm() < config.eps_bar * std::sqrt(delta)) {
        reset = true;
        directions = {g_new};
        last_multiplier = {0.0};
        model.directions = directions;
        model.offsets = compute_offsets(model, config.offset_delta);
        sol = try_solve_qp(model, delta);
      }
    }
    if (config.iteration_hook) {
      const auto [h_lo, h_hi] = symmetric_eig_bounds(model.hess);
      config.iteration_hook({static_cast<int>(directions.size()), reset, h_lo,
                             h_hi, delta});
    }
    if (!sol) {
      delta *= config.zeta1_bar;
      out.trace.push_back({out.x, out.f, delta, 0.0});
      continue;
    }
    for (std::size_t j = 0; j < directions.size(); ++j) {
      last_multiplier[j] = sol->multipliers(static_cast<Eigen::Index>(j));
    }

    const Vector& s = sol->step;
    double rho = -std::numeric_limits<double>::infinity();
    double f_trial = out.f;
    if (s.norm() > 0.0) {
      f_trial = oracle(out.x + s);
      rho = (out.f - f_trial) /
            (config.theta_bar * std::pow(s.norm(), config.p_bar + 1.0));
    }
    if (rho >= config.eta1_bar) {
      out.x += s;
      out.f = f_trial;
      delta *= config.zeta2_bar;
    } else {
      delta *= config.zeta1_bar;
    }
    out.trace.push_back({out.x, out.f, delta, rho});
  }
  throw BudgetError("solve_nonsmooth: iteration budget exhausted", out.x,
                    out.f, delta);
}

}  // namespace admmdfo
