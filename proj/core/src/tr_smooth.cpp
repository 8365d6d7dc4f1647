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

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "admmdfo/numerics.hpp"
#include "poly_basis.hpp"

namespace admmdfo {

namespace {

using detail::QuadPoly;
using detail::basis_at;
using detail::full_basis;
using detail::max_abs_on_unit_ball;
using detail::quad_terms;
using detail::unpack;

constexpr double kPivotTol = 1e-3;
constexpr double kRadiusUnderflow = 1e-14;

// Minimum-Frobenius-norm quadratic fit through scaled points. Interpolates
// exactly whenever the KKT system is nonsingular (full sets included); falls
// back to ridge regression on degenerate geometry.
struct MfnFit {
  bool ok = false;
  Eigen::FullPivLU<Matrix> lu;
  Matrix phi_l;  // p x (n+1)
  Matrix phi_q;  // p x nq
  int p = 0;
  int n = 0;

  // Solve for one data vector; returns basis coefficients.
  Vector solve(const Vector& values) const {
    Vector rhs = Vector::Zero(p + n + 1);
    rhs.head(p) = values;
    const Vector sol = lu.solve(rhs);
    const Vector mu = sol.head(p);
    const Vector w_l = sol.tail(n + 1);
    Vector coeffs(full_basis(n));
    coeffs.head(n + 1) = w_l;
    coeffs.tail(quad_terms(n)) = phi_q.transpose() * mu;
    return coeffs;
  }
};

MfnFit factor_mfn(const std::vector<Vector>& pts_t, int n) {
  MfnFit fit;
  fit.n = n;
  fit.p = static_cast<int>(pts_t.size());
  const int nq = quad_terms(n);
  fit.phi_l.resize(fit.p, n + 1);
  fit.phi_q.resize(fit.p, nq);
  for (int i = 0; i < fit.p; ++i) {
    const Vector phi = basis_at(pts_t[i]);
    fit.phi_l.row(i) = phi.head(n + 1).transpose();
    fit.phi_q.row(i) = phi.tail(nq).transpose();
  }
  Matrix kkt = Matrix::Zero(fit.p + n + 1, fit.p + n + 1);
  Matrix gram = fit.phi_q * fit.phi_q.transpose();
  gram.diagonal().array() += 1e-12 * (1.0 + gram.trace() / std::max(fit.p, 1));
  kkt.topLeftCorner(fit.p, fit.p) = gram;
  kkt.topRightCorner(fit.p, n + 1) = fit.phi_l;
  kkt.bottomLeftCorner(n + 1, fit.p) = fit.phi_l.transpose();
  fit.lu.compute(kkt);
  fit.ok = fit.lu.isInvertible();
  return fit;
}

Vector ridge_fit(const std::vector<Vector>& pts_t,
                 const std::vector<double>& values, int n) {
  const int p = static_cast<int>(pts_t.size());
  Matrix phi(p, full_basis(n));
  Vector v(p);
  for (int i = 0; i < p; ++i) {
    phi.row(i) = basis_at(pts_t[i]).transpose();
    v(i) = values[i];
  }
  return solve_least_squares_ridge(phi, v);
}

struct ScaledSample {
  Vector t;
  double value = 0.0;
};

// Greedy pivoted selection of a poised subset, center forced first. When
// `oracle` is given, columns of the linear section with no usable pivot are
// filled with fresh evaluations at the pivot polynomial's ball maximizer.
struct Selection {
  std::vector<ScaledSample> points;  // points[0] is the center
  bool linear_complete = false;
};

Selection select_poised(std::vector<ScaledSample> candidates, int n,
                        Oracle* oracle, const Vector& center, double radius) {
  const int pf = full_basis(n);
  Selection out;

  std::vector<Vector> polys(pf);
  for (int k = 0; k < pf; ++k) polys[k] = Vector::Unit(pf, k);

  std::vector<Vector> cand_phi(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cand_phi[i] = basis_at(candidates[i].t);
  }
  std::vector<bool> used(candidates.size(), false);

  auto eliminate = [&](int k, const Vector& phi_sel) {
    const double piv = polys[k].dot(phi_sel);
    polys[k] /= piv;
    for (int j = 0; j < pf; ++j) {
      if (j == k) continue;
      polys[j] -= polys[j].dot(phi_sel) * polys[k];
    }
  };

  // Column 0 (the constant) pivots on the center, assumed to be candidate 0.
  out.points.push_back(candidates[0]);
  used[0] = true;
  eliminate(0, cand_phi[0]);

  int selected_linear = 0;
  for (int k = 1; k < pf; ++k) {
    double norm = polys[k].norm();
    if (norm <= 0.0) continue;
    int best = -1;
    double best_val = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const double v = std::abs(polys[k].dot(cand_phi[i])) / norm;
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0 && best_val >= kPivotTol) {
      used[best] = true;
      out.points.push_back(candidates[best]);
      eliminate(k, cand_phi[best]);
      if (k <= n) ++selected_linear;
      continue;
    }
    if (oracle != nullptr) {
      // No history point exposes this basis direction; buy one evaluation at
      // the pivot polynomial's ball maximizer.
      const QuadPoly pp = unpack(polys[k] / norm, n);
      auto [mag, t_new] = max_abs_on_unit_ball(pp);
      if (mag < kPivotTol) continue;
      const Vector x_new = center + radius * t_new;
      ScaledSample fresh{t_new, (*oracle)(x_new)};
      candidates.push_back(fresh);
      cand_phi.push_back(basis_at(t_new));
      used.push_back(true);
      out.points.push_back(fresh);
      eliminate(k, cand_phi.back());
      if (k <= n) ++selected_linear;
    }
  }
  out.linear_complete = selected_linear == n;
  return out;
}

struct FitOutcome {
  QuadPoly poly;           // scaled coordinates
  bool interpolating = false;
};

FitOutcome fit_points(const std::vector<ScaledSample>& pts, int n) {
  std::vector<Vector> ts(pts.size());
  std::vector<double> vs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ts[i] = pts[i].t;
    vs[i] = pts[i].value;
  }
  FitOutcome out;
  if (static_cast<int>(pts.size()) >= n + 1) {
    const MfnFit fit = factor_mfn(ts, n);
    if (fit.ok) {
      Vector values(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) values(i) = vs[i];
      out.poly = unpack(fit.solve(values), n);
      out.interpolating = true;
      return out;
    }
  }
  out.poly = unpack(ridge_fit(ts, vs, n), n);
  return out;
}

// Lambda-poisedness of the set on the unit ball via its Lagrange polynomials,
// plus the replacement candidate (index and new point) for the worst one.
struct Poisedness {
  double lambda = std::numeric_limits<double>::infinity();
  int worst = -1;
  Vector t_new;
};

Poisedness measure_poisedness(const std::vector<ScaledSample>& pts, int n) {
  Poisedness out;
  std::vector<Vector> ts(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) ts[i] = pts[i].t;
  const MfnFit fit = factor_mfn(ts, n);
  if (!fit.ok) return out;
  const int p = static_cast<int>(pts.size());
  out.lambda = 0.0;
  double worst_replaceable = 0.0;
  for (int j = 0; j < p; ++j) {
    Vector indicator = Vector::Zero(p);
    indicator(j) = 1.0;
    const QuadPoly lag = unpack(fit.solve(indicator), n);
    auto [mag, t_star] = max_abs_on_unit_ball(lag);
    out.lambda = std::max(out.lambda, mag);
    if (j > 0 && mag > worst_replaceable) {  // never replace the center
      worst_replaceable = mag;
      out.worst = j;
      out.t_new = t_star;
    }
  }
  return out;
}

Matrix clip_spectrum(const Matrix& h, double bound) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()));
  Vector lam = es.eigenvalues();
  if (lam.cwiseAbs().maxCoeff() <= bound) return 0.5 * (h + h.transpose());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam(i) = std::clamp(lam(i), -bound, bound);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

SurrogateModel build_impl(Oracle& oracle, const Vector& center, double radius,
                          const SmoothTrConfig& config, bool improve) {
  if (!(radius > 0.0)) throw InputError("model build: radius must be positive");
  if (radius < kRadiusUnderflow) {
    throw GeometryError("model build: radius underflow");
  }
  const int n = static_cast<int>(center.size());
  const int pf = full_basis(n);
  const double f_center = oracle(center);

  auto gather = [&]() {
    std::vector<ScaledSample> cands;
    auto hist = oracle.nearby(center, config.sample_reach * radius);
    cands.reserve(hist.size());
    for (auto& [pt, val] : hist) {
      cands.push_back({(pt - center) / radius, val});
    }
    // Center first, remaining by closeness, capped.
    auto it = std::find_if(cands.begin(), cands.end(), [](const ScaledSample& s) {
      return s.t.norm() == 0.0;
    });
    if (it != cands.end()) std::iter_swap(cands.begin(), it);
    std::sort(cands.begin() + 1, cands.end(),
              [](const ScaledSample& a, const ScaledSample& b) {
                return a.t.norm() < b.t.norm();
              });
    const std::size_t cap = static_cast<std::size_t>(6 * pf);
    if (cands.size() > cap) cands.resize(cap);
    return cands;
  };

  std::vector<ScaledSample> cands = gather();
  if (cands.empty() || cands[0].t.norm() != 0.0) {
    cands.insert(cands.begin(), {Vector::Zero(n), f_center});
  }

  Selection sel = select_poised(std::move(cands), n,
                                improve ? &oracle : nullptr, center, radius);

  FitOutcome fit = fit_points(sel.points, n);
  Poisedness pois = measure_poisedness(sel.points, n);

  if (improve) {
    const int max_swaps = 3 * pf;
    for (int rep = 0; rep < max_swaps && pois.lambda > config.poisedness_bound;
         ++rep) {
      if (pois.worst < 0) break;
      const Vector x_new = center + radius * pois.t_new;
      sel.points[pois.worst] = {pois.t_new, oracle(x_new)};
      pois = measure_poisedness(sel.points, n);
    }
    fit = fit_points(sel.points, n);
  }

  SurrogateModel model;
  model.center = center;
  model.f_center = f_center;
  model.g = fit.poly.g / radius;
  model.h = clip_spectrum(fit.poly.h / (radius * radius), config.kappa_bhm);
  model.sample_set.reserve(sel.points.size());
  for (const auto& s : sel.points) {
    model.sample_set.emplace_back(center + radius * s.t, s.value);
  }

  // Certificate: enough points, poised, and the (clipped) model still
  // reproduces its samples to within the quadratic error budget.
  bool residual_ok = true;
  double vscale = 1.0;
  for (const auto& [pt, val] : model.sample_set) {
    vscale = std::max(vscale, std::abs(val));
  }
  const double budget =
      std::max(1e2 * radius * radius, 1e-9 * vscale);
  for (const auto& [pt, val] : model.sample_set) {
    if (std::abs(model.value(pt) - val) > budget) {
      residual_ok = false;
      break;
    }
  }
  model.certified = static_cast<int>(sel.points.size()) >= n + 1 &&
                    sel.linear_complete && fit.interpolating &&
                    pois.lambda <= config.poisedness_bound && residual_ok;
  model.certificate_radius = model.certified ? radius : 0.0;
  return model;
}

}  // namespace

void SmoothTrConfig::validate() const {
  const bool ok = 0.0 <= eta0 && eta0 <= eta1 && eta1 < 1.0 && eps_c > 0.0 &&
                  kappa_fcd > 0.0 && kappa_fcd <= 1.0 && alpha > 0.0 &&
                  alpha < 1.0 && zeta > 0.0 && zeta < 1.0 && gamma_inc > 1.0 &&
                  mu > tau && tau > 0.0 && delta_max > 0.0 && kappa_bhm > 0.0 &&
                  poisedness_bound >= 1.0 && sample_reach >= 1.0 &&
                  max_iters >= 1;
  if (!ok) throw InputError("SmoothTrConfig: ordering constraints violated");
}

SurrogateModel build_fully_linear(Oracle& oracle, const Vector& center,
                                  double radius,
                                  const SmoothTrConfig& config) {
  return build_impl(oracle, center, radius, config, /*improve=*/true);
}

SurrogateModel refit_model(Oracle& oracle, const Vector& center, double radius,
                           const SmoothTrConfig& config) {
  return build_impl(oracle, center, radius, config, /*improve=*/false);
}

std::pair<SurrogateModel, double> criticality_step(
    SurrogateModel incumbent, double delta_icb, double stop_radius,
    Oracle& oracle, const SmoothTrConfig& config) {
  if (incumbent.g.size() == 0) {
    throw InputError("criticality_step: model lacks a gradient estimate");
  }
  const double g_norm = incumbent.g.norm();
  if (g_norm > config.eps_c) return {std::move(incumbent), delta_icb};
  if (incumbent.certified_on(delta_icb) &&
      delta_icb <= config.mu * g_norm) {
    return {std::move(incumbent), delta_icb};
  }

  SurrogateModel refined;
  double delta_tilde = delta_icb;
  for (int u = 0;; ++u) {
    delta_tilde = std::pow(config.alpha, u) * delta_icb;
    if (delta_tilde < kRadiusUnderflow) {
      throw GeometryError("criticality_step: radius underflow");
    }
    refined = build_fully_linear(oracle, incumbent.center, delta_tilde, config);
    if (delta_tilde <= config.mu * refined.g.norm()) break;
    if (delta_tilde <= stop_radius) break;  // caller's termination will fire
  }
  const double clamped = std::min(
      std::max(delta_tilde, config.tau * refined.g.norm()), delta_icb);
  return {std::move(refined), clamped};
}

Vector compute_step(const SurrogateModel& model, double radius,
                    const SmoothTrConfig& config) {
  if (!(radius > 0.0)) throw InputError("compute_step: radius must be positive");
  if (!all_finite(model.g) || !all_finite(model.h)) {
    throw NumericError("compute_step: non-finite model");
  }
  const double g_norm = model.g.norm();
  if (g_norm == 0.0) return Vector::Zero(model.g.size());
  const Vector s = minimize_quadratic_on_ball(model.g, model.h, radius);
#ifndef NDEBUG
  const double decrease = -(model.g.dot(s) + 0.5 * s.dot(model.h * s));
  const double h_norm = model.h.norm();
  double cauchy_scale = std::min(g_norm, radius);
  if (h_norm > 0.0) cauchy_scale = std::min(cauchy_scale, g_norm / h_norm);
  assert(decrease >=
         0.5 * config.kappa_fcd * g_norm * cauchy_scale - 1e-10 * (1 + g_norm));
#endif
  return s;
}

TrResult solve_smooth(Oracle& oracle, const Vector& x0, double delta0,
                      double stop_radius, const SmoothTrConfig& config) {
  config.validate();
  if (!(stop_radius > 0.0)) {
    throw InputError("solve_smooth: stop_radius must be positive");
  }
  if (!(delta0 > 0.0) || delta0 > config.delta_max) {
    throw InputError("solve_smooth: delta0 outside (0, delta_max]");
  }

  TrResult out;
  out.x = x0;
  out.f = oracle(x0);

  SurrogateModel incumbent = build_fully_linear(oracle, out.x, delta0, config);
  double delta_icb = delta0;

  for (int q = 0; q < config.max_iters; ++q) {
    auto [model, delta] = criticality_step(std::move(incumbent), delta_icb,
                                           stop_radius, oracle, config);
    if (delta <= stop_radius) {
      out.delta_final = delta;
      return out;
    }

    const Vector s = compute_step(model, delta, config);
    const double predicted = model.value(out.x) - model.value(out.x + s);
    const bool model_fl = model.certified_on(delta);

    double rho = -std::numeric_limits<double>::infinity();
    bool success = false;
    bool acceptable = false;
    if (predicted > 0.0) {
      const double f_trial = oracle(out.x + s);
      rho = (out.f - f_trial) / predicted;
      success = rho >= config.eta1;
      acceptable = success || (rho >= config.eta0 && model_fl);
      if (acceptable) {
        out.x += s;
        out.f = f_trial;
      }
    }

    // Step 5 radius update, then refresh the incumbent around the (possibly
    // moved) center. Geometry money is spent only on certified rejections.
    if (success) {
      delta_icb = std::min(config.gamma_inc * delta, config.delta_max);
      incumbent = refit_model(oracle, out.x, delta_icb, config);
    } else if (model_fl) {
      delta_icb = config.zeta * delta;
      incumbent = refit_model(oracle, out.x, delta_icb, config);
    } else {
      delta_icb = delta;
      incumbent = build_fully_linear(oracle, out.x, delta_icb, config);
    }
    out.trace.push_back({out.x, out.f, delta, rho});
  }
  throw BudgetError("solve_smooth: iteration budget exhausted", out.x, out.f,
                    delta_icb);
}

}  // namespace admmdfo
