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

#include "admmdfo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <tuple>

namespace admmdfo {

namespace {

constexpr double kMultiplierTol = 1e-9;

// Secular-equation solve of min g's + 1/2 s'Hs on ||s|| <= radius in the
// eigenbasis of H. Returns (s, sigma) with (H + sigma I) s = -g, sigma >= 0.
std::pair<Vector, double> trs_eig(const Vector& grad, const Matrix& hess,
                                  double radius) {
  const Eigen::Index n = grad.size();
  if (n == 0) return {Vector(0), 0.0};
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hess + hess.transpose()));
  const Vector lam = es.eigenvalues();
  const Matrix q = es.eigenvectors();
  const Vector gh = q.transpose() * grad;
  const double lam_min = lam.minCoeff();

  auto coords_at = [&](double sigma) {
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = -gh(i) / (lam(i) + sigma);
    return s;
  };
  auto norm2_at = [&](double sigma) {
    double t = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = lam(i) + sigma;
      t += gh(i) * gh(i) / (d * d);
    }
    return t;
  };

  if (lam_min > 0.0) {
    const Vector s = coords_at(0.0);
    if (s.norm() <= radius) return {q * s, 0.0};
  }

  const double sigma_lo = std::max(0.0, -lam_min);
  const double eps_gap = 1e-12 * (1.0 + lam.cwiseAbs().maxCoeff());

  // Limit solution as sigma -> sigma_lo^+ using the pseudo-inverse on the
  // non-degenerate eigenspace; finite only if g has no component on the
  // minimal eigenspace.
  bool finite_limit = true;
  Vector pseudo = Vector::Zero(n);
  const double gscale = 1.0 + gh.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = lam(i) + sigma_lo;
    if (d > eps_gap) {
      pseudo(i) = -gh(i) / d;
    } else if (std::abs(gh(i)) > 1e-11 * gscale) {
      finite_limit = false;
    }
  }
  if (finite_limit && pseudo.norm() <= radius) {
    if (sigma_lo == 0.0) return {q * pseudo, 0.0};
    // Hard case: pad with a minimal-eigenspace component to reach the boundary.
    const double t =
        std::sqrt(std::max(0.0, radius * radius - pseudo.squaredNorm()));
    Eigen::Index j = 0;  // eigenvalues are sorted ascending
    pseudo(j) += t;
    return {q * pseudo, sigma_lo};
  }

  // ||s(sigma)|| is strictly decreasing on (sigma_lo, inf); bisect to the
  // boundary root.
  double lo = sigma_lo;
  double hi = sigma_lo + std::max(1.0, gh.norm() / radius);
  int guard = 0;
  while (norm2_at(hi) > radius * radius) {
    hi = sigma_lo + 2.0 * (hi - sigma_lo);
    if (++guard > 400) throw NumericError("trust-region scalar search diverged");
  }
  for (int it = 0; it < 160; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (norm2_at(mid) > radius * radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {q * coords_at(hi), hi};
}

// Concave simplex QP: maximize -1/2 lam' M lam + c' lam over the unit
// simplex, by an NNLS-style support active set (objective never worsens, so
// it cannot cycle). Returns (lam, alpha), alpha being the equality
// multiplier; at optimality c_i - (M lam)_i == alpha on the support and
// <= alpha elsewhere.
struct SimplexQpResult {
  bool ok = false;
  Vector lam;
  double alpha = 0.0;
};

SimplexQpResult maximize_on_simplex(const Matrix& m, const Vector& c,
                                    std::vector<int>& support) {
  const int k = static_cast<int>(c.size());
  SimplexQpResult out;
  out.lam = Vector::Zero(k);
  if (support.empty()) {
    int start = 0;
    for (int i = 1; i < k; ++i) {
      if (c(i) > c(start)) start = i;
    }
    support = {start};
  }
  out.lam(support[0]) = 1.0;
  if (support.size() > 1) {  // stale warm start; restart from a vertex
    support.resize(1);
  }

  const double scale = 1.0 + m.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
  const int max_iters = 60 + 12 * k;
  for (int iter = 0; iter < max_iters; ++iter) {
    const int sz = static_cast<int>(support.size());
    Matrix kkt = Matrix::Zero(sz + 1, sz + 1);
    Vector rhs(sz + 1);
    for (int a = 0; a < sz; ++a) {
      for (int b = 0; b < sz; ++b) kkt(a, b) = m(support[a], support[b]);
      kkt(a, a) += 1e-13 * scale;
      kkt(a, sz) = 1.0;
      kkt(sz, a) = 1.0;
      rhs(a) = c(support[a]);
    }
    rhs(sz) = 1.0;
    const Vector sol = kkt.fullPivLu().solve(rhs);
    if (!sol.allFinite()) return {};
    const Vector lam_face = sol.head(sz);
    const double alpha = sol(sz);

    if (lam_face.minCoeff() < -kMultiplierTol) {
      // Walk toward the face optimum until a coordinate hits zero; drop it.
      double t = 1.0;
      int drop = -1;
      for (int a = 0; a < sz; ++a) {
        const double cur = out.lam(support[a]);
        const double next = lam_face(a);
        if (next < cur) {
          const double step = cur / (cur - next);
          if (step < t) {
            t = step;
            drop = a;
          }
        }
      }
      if (drop < 0 || sz == 1) return {};
      for (int a = 0; a < sz; ++a) {
        const double v =
            (1.0 - t) * out.lam(support[a]) + t * lam_face(a);
        out.lam(support[a]) = std::max(0.0, v);
      }
      out.lam(support[drop]) = 0.0;
      support.erase(support.begin() + drop);
      continue;
    }

    out.lam.setZero();
    for (int a = 0; a < sz; ++a) out.lam(support[a]) = lam_face(a);

    // Off-support optimality: c_i - (M lam)_i <= alpha.
    const Vector grad = c - m * out.lam;
    int add = -1;
    double worst = kMultiplierTol * scale;
    for (int i = 0; i < k; ++i) {
      if (std::find(support.begin(), support.end(), i) != support.end()) {
        continue;
      }
      const double v = grad(i) - alpha;
      if (v > worst) {
        worst = v;
        add = i;
      }
    }
    if (add < 0) {
      out.ok = true;
      out.alpha = alpha;
      return out;
    }
    support.push_back(add);
  }
  return {};
}

// Exact solve of the cut-epigraph QP restricted to one prescribed support
// (cuts treated as equalities), via null-space reduction to a dense TRS.
// Handles indefinite reduced curvature, including its hard case.
struct SupportSolve {
  bool ok = false;
  Vector step;
  Vector lam;  // one entry per support member
  double alpha = 0.0;
  double nu = 0.0;
};

struct ReducedCandidate {
  Vector d;
  double sigma = 0.0;
};

// All first-order candidates of min g'd + 1/2 d'Hd on ||d|| <= rad: the
// global solution, the unconstrained stationary point when interior, and
// every nonnegative secular root (boundary-stationary points that are not
// minima of the reduced problem can still carry the full problem's KKT
// point).
std::vector<ReducedCandidate> reduced_candidates(const Matrix& hd,
                                                 const Vector& gd,
                                                 double rad) {
  std::vector<ReducedCandidate> out;
  const Eigen::Index r = gd.size();
  if (r == 0 || rad <= 0.0) return out;
  auto [d_global, sigma_global] = trs_eig(gd, hd, rad);
  out.push_back({d_global, sigma_global});

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hd + hd.transpose()));
  const Vector lam = es.eigenvalues();
  const Matrix q = es.eigenvectors();
  const Vector gh = q.transpose() * gd;

  Eigen::FullPivLU<Matrix> lu(0.5 * (hd + hd.transpose()));
  if (lu.isInvertible()) {
    const Vector d0 = -lu.solve(gd);
    if (d0.norm() <= rad) out.push_back({d0, 0.0});
  }

  auto phi = [&](double sigma) {
    double t = -rad * rad;
    for (Eigen::Index i = 0; i < r; ++i) {
      const double den = lam(i) + sigma;
      t += gh(i) * gh(i) / (den * den);
    }
    return t;
  };
  // Pole positions at -lam_i; phi is smooth and convex between consecutive
  // poles, so each interval holds at most two roots.
  std::vector<double> edges{0.0};
  for (Eigen::Index i = 0; i < r; ++i) {
    if (-lam(i) > 0.0) edges.push_back(-lam(i));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const double span = 1.0 + lam.cwiseAbs().maxCoeff() + gh.norm() / rad;
  edges.push_back(edges.back() + 8.0 * span);

  const double gap = 1e-10 * span;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e] + gap;
    const double b = edges[e + 1] - gap;
    if (!(b > a)) continue;
    const int grid = 48;
    double prev_s = a;
    double prev_v = phi(a);
    for (int t = 1; t <= grid; ++t) {
      const double cur_s = a + (b - a) * t / grid;
      const double cur_v = phi(cur_s);
      if ((prev_v > 0.0) != (cur_v > 0.0)) {
        double lo = prev_s, hi = cur_s;
        for (int it = 0; it < 120; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((phi(mid) > 0.0) == (prev_v > 0.0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        const double sigma = 0.5 * (lo + hi);
        Vector d(r);
        for (Eigen::Index i = 0; i < r; ++i) {
          d(i) = -gh(i) / (lam(i) + sigma);
        }
        out.push_back({q * d, sigma});
      }
      prev_s = cur_s;
      prev_v = cur_v;
    }
  }
  return out;
}

std::vector<SupportSolve> solve_with_support(const Matrix& hess,
                                             const std::vector<LinearCut>& cuts,
                                             const std::vector<int>& support,
                                             double radius) {
  const Eigen::Index n = hess.rows();
  const int k = static_cast<int>(support.size());
  const Vector& g0 = cuts[support[0]].direction;
  const double c0 = cuts[support[0]].offset;

  Vector s_particular = Vector::Zero(n);
  Matrix null_basis = Matrix::Identity(n, n);
  if (k > 1) {
    Matrix d(k - 1, n);
    Vector e(k - 1);
    for (int j = 1; j < k; ++j) {
      d.row(j - 1) = (cuts[support[j]].direction - g0).transpose();
      e(j - 1) = c0 - cuts[support[j]].offset;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(d);
    s_particular = cod.solve(e);
    if ((d * s_particular - e).norm() > 1e-9 * (1.0 + e.norm())) return {};
    Eigen::FullPivLU<Matrix> lu(d);
    const Matrix kernel = lu.kernel();
    if (kernel.cols() == 0 || kernel.norm() == 0.0) {
      null_basis = Matrix::Zero(n, 0);
    } else {
      Eigen::HouseholderQR<Matrix> qr(kernel);
      null_basis = qr.householderQ() * Matrix::Identity(n, kernel.cols());
    }
  }

  const double slack2 = radius * radius - s_particular.squaredNorm();
  if (slack2 < -1e-12 * radius * radius) return {};
  const double radius_d = std::sqrt(std::max(0.0, slack2));
  const bool boundary_pinned =
      null_basis.cols() == 0 || radius_d <= 1e-14 * radius;

  std::vector<ReducedCandidate> cands;
  if (boundary_pinned) {
    cands.push_back({Vector::Zero(null_basis.cols()), 0.0});
  } else {
    const Matrix hess_d = null_basis.transpose() * hess * null_basis;
    const Vector grad_d = null_basis.transpose() * (hess * s_particular + g0);
    cands = reduced_candidates(hess_d, grad_d, radius_d);
  }

  std::vector<SupportSolve> results;
  for (const ReducedCandidate& cand : cands) {
    Vector step = s_particular;
    if (cand.d.size() > 0) step += null_basis * cand.d;

    // The ball multiplier may only be free when the ball is active.
    const bool on_boundary =
        std::abs(step.norm() - radius) <= 1e-9 * (1.0 + radius);
    const bool free_nu = boundary_pinned && on_boundary;

    Matrix sys(n + 1, free_nu ? k + 1 : k);
    Vector rhs(n + 1);
    for (int j = 0; j < k; ++j) {
      sys.col(j).head(n) = cuts[support[j]].direction;
      sys(n, j) = 1.0;
    }
    SupportSolve out;
    if (free_nu) {
      sys.col(k).head(n) = 2.0 * step;
      sys(n, k) = 0.0;
      rhs.head(n) = -(hess * step);
    } else {
      out.nu = boundary_pinned ? 0.0 : 0.5 * cand.sigma;
      rhs.head(n) = -(hess * step) - 2.0 * out.nu * step;
    }
    rhs(n) = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys);
    const Vector sol = cod.solve(rhs);
    if ((sys * sol - rhs).norm() > 1e-7 * (1.0 + rhs.norm() + hess.norm())) {
      continue;
    }
    out.step = step;
    out.lam = sol.head(k);
    if (free_nu) out.nu = sol(k);
    out.alpha = c0 + g0.dot(step);
    if (out.nu < -1e-8 || !out.step.allFinite() || !out.lam.allFinite()) {
      continue;
    }
    if (out.nu > 0.0 && !on_boundary) continue;  // complementarity
    out.nu = std::max(0.0, out.nu);
    out.ok = true;
    results.push_back(std::move(out));
  }
  return results;
}

double cut_objective(const Matrix& hess, const std::vector<LinearCut>& cuts,
                     const Vector& s) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& cut : cuts) {
    worst = std::max(worst, cut.offset + cut.direction.dot(s));
  }
  return 0.5 * s.dot(hess * s) + worst;
}

// Last-resort path for instances the dual bisection cannot certify (the
// nonconvex hard case): enumerate supports of size <= n+1 and keep the best
// KKT-verified candidate.
std::optional<QpSolution> enumerate_supports(const Matrix& hess,
                                             const std::vector<LinearCut>& cuts,
                                             double radius) {
  const int k = static_cast<int>(cuts.size());
  const int n = static_cast<int>(hess.rows());
  if (k > 20) return std::nullopt;
  const int max_size = std::min(k, n + 1);

  std::optional<QpSolution> best;
  double best_val = std::numeric_limits<double>::infinity();

  auto consider = [&](const std::vector<int>& support) {
    for (const SupportSolve& res :
         solve_with_support(hess, cuts, support, radius)) {
      if (!res.ok) continue;
      if (res.lam.minCoeff() < -1e-9) continue;
      bool feasible = true;
      for (int i = 0; i < k && feasible; ++i) {
        if (std::find(support.begin(), support.end(), i) != support.end()) {
          continue;
        }
        if (cuts[i].offset + cuts[i].direction.dot(res.step) >
            res.alpha + 1e-8 * (1.0 + std::abs(res.alpha))) {
          feasible = false;
        }
      }
      if (!feasible) continue;
      Vector stat = hess * res.step + 2.0 * res.nu * res.step;
      for (int j = 0; j < static_cast<int>(support.size()); ++j) {
        stat += std::max(0.0, res.lam(j)) * cuts[support[j]].direction;
      }
      if (stat.norm() > 1e-7 * (1.0 + hess.norm())) continue;
      const double val = cut_objective(hess, cuts, res.step);
      if (val < best_val) {
        best_val = val;
        QpSolution sol;
        sol.step = res.step;
        sol.alpha = res.alpha;
        sol.tr_multiplier = res.nu;
        sol.multipliers = Vector::Zero(k);
        for (int j = 0; j < static_cast<int>(support.size()); ++j) {
          sol.multipliers(support[j]) = std::max(0.0, res.lam(j));
        }
        best = std::move(sol);
      }
    }
  };

  std::vector<int> comb;
  // Iterative enumeration of all supports of each size.
  for (int size = 1; size <= max_size; ++size) {
    comb.assign(size, 0);
    for (int i = 0; i < size; ++i) comb[i] = i;
    while (true) {
      consider(comb);
      int pos = size - 1;
      while (pos >= 0 && comb[pos] == k - size + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int j = pos + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return best;
}

}  // namespace

Vector solve_least_squares(const Matrix& m, const Vector& rhs) {
  if (m.rows() != rhs.size()) {
    throw InputError("solve_least_squares: rhs length does not match rows");
  }
  if (m.rows() < m.cols()) {
    throw RankError("solve_least_squares: fewer rows than columns");
  }
  if (!all_finite(m) || !all_finite(rhs)) {
    throw NumericError("solve_least_squares: non-finite input");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  if (qr.rank() < m.cols()) {
    throw RankError("solve_least_squares: rank-deficient matrix");
  }
  return qr.solve(rhs);
}

Vector solve_least_squares_ridge(const Matrix& m, const Vector& rhs) {
  if (m.rows() != rhs.size()) {
    throw InputError("solve_least_squares_ridge: shape mismatch");
  }
  const Eigen::Index n = m.cols();
  Matrix normal = m.transpose() * m;
  const double ridge =
      1e-10 * std::max(normal.trace() / std::max<Eigen::Index>(n, 1), 1e-30);
  normal.diagonal().array() += ridge;
  return normal.ldlt().solve(m.transpose() * rhs);
}

std::pair<double, double> symmetric_eig_bounds(const Matrix& h) {
  if (h.rows() != h.cols()) throw InputError("symmetric_eig_bounds: not square");
  if (h.rows() == 0) return {0.0, 0.0};
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()),
                                           Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Vector minimize_quadratic_on_ball(const Vector& grad, const Matrix& hess,
                                  double radius) {
  if (radius <= 0.0) throw InputError("minimize_quadratic_on_ball: radius <= 0");
  if (hess.rows() != grad.size() || hess.cols() != grad.size()) {
    throw InputError("minimize_quadratic_on_ball: shape mismatch");
  }
  if (!all_finite(grad) || !all_finite(hess)) {
    throw NumericError("minimize_quadratic_on_ball: non-finite input");
  }
  return trs_eig(grad, hess, radius).first;
}

QpSolution solve_tr_qp(const QpProblem& qp) {
  const Eigen::Index n = qp.hessian.rows();
  if (qp.cuts.empty()) throw InputError("solve_tr_qp: needs at least one cut");
  if (qp.radius <= 0.0) throw InputError("solve_tr_qp: radius <= 0");
  if (qp.hessian.cols() != n) throw InputError("solve_tr_qp: hessian not square");
  const double hscale = qp.hessian.cwiseAbs().maxCoeff();
  if ((qp.hessian - qp.hessian.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + hscale)) {
    throw InputError("solve_tr_qp: hessian not symmetric");
  }
  for (const LinearCut& cut : qp.cuts) {
    if (cut.direction.size() != n || !all_finite(cut.direction) ||
        !std::isfinite(cut.offset)) {
      throw InputError("solve_tr_qp: bad cut");
    }
  }
  const Matrix hess = 0.5 * (qp.hessian + qp.hessian.transpose());
  const int num_cuts = static_cast<int>(qp.cuts.size());

  // Work in the eigenbasis of H; the ball multiplier nu keeps H + 2 nu I
  // positive definite, and ||s(nu)|| is nonincreasing in nu, so the boundary
  // root is found by bisection over the dual solves.
  Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
  const Vector eigs = es.eigenvalues();
  const Matrix q = es.eigenvectors();
  Matrix g_hat(num_cuts, n);
  Vector offsets(num_cuts);
  for (int i = 0; i < num_cuts; ++i) {
    g_hat.row(i) = (q.transpose() * qp.cuts[i].direction).transpose();
    offsets(i) = qp.cuts[i].offset;
  }

  const double nu_min = std::max(0.0, -eigs.minCoeff()) / 2.0;
  std::vector<int> support;

  struct DualEval {
    bool ok = false;
    Vector lam;
    Vector step;  // original coordinates
    double alpha = 0.0;
  };
  auto eval_at = [&](double nu) {
    DualEval out;
    Vector inv(n);
    for (Eigen::Index i = 0; i < n; ++i) inv(i) = 1.0 / (eigs(i) + 2.0 * nu);
    if (!inv.allFinite() || inv.minCoeff() <= 0.0) return out;
    const Matrix m = g_hat * inv.asDiagonal() * g_hat.transpose();
    SimplexQpResult dual = maximize_on_simplex(m, offsets, support);
    if (!dual.ok) return out;
    const Vector s_hat = -(inv.asDiagonal() * (g_hat.transpose() * dual.lam));
    out.ok = true;
    out.lam = dual.lam;
    out.step = q * s_hat;
    out.alpha = dual.alpha;
    return out;
  };

  const double tiny = 1e-12 * (1.0 + hscale);
  double nu = nu_min == 0.0 ? 0.0 : nu_min + tiny;
  DualEval cur = eval_at(nu);  // fails when H + 2 nu I is singular
  bool hard_case = false;

  if (!cur.ok || cur.step.norm() > qp.radius) {
    double lo = nu;
    double hi = std::max(1.0, nu + hscale);
    DualEval at_hi = eval_at(hi);
    int guard = 0;
    while (!at_hi.ok || at_hi.step.norm() > qp.radius) {
      hi = 2.0 * hi + 1.0;
      at_hi = eval_at(hi);
      if (++guard > 200) throw QpFailure("solve_tr_qp: nu search diverged");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const DualEval at_mid = eval_at(mid);
      if (at_mid.ok && at_mid.step.norm() <= qp.radius) {
        hi = mid;
        at_hi = at_mid;
      } else {
        lo = mid;
      }
    }
    nu = hi;
    cur = at_hi;
    // Newton polish of the boundary root with the dual weights re-solved
    // each round; drives the complementarity gap to machine precision.
    for (int round = 0; round < 8; ++round) {
      const Vector w = g_hat.transpose() * cur.lam;
      double phi = -qp.radius * qp.radius;
      double dphi = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = eigs(i) + 2.0 * nu;
        phi += w(i) * w(i) / (d * d);
        dphi -= 4.0 * w(i) * w(i) / (d * d * d);
      }
      if (std::abs(phi) <= 1e-13 * (1.0 + qp.radius * qp.radius)) break;
      if (dphi == 0.0) break;
      const double next = nu - phi / dphi;
      if (!(next > lo) || !std::isfinite(next)) break;
      const DualEval at_next = eval_at(next);
      if (!at_next.ok) break;
      nu = next;
      cur = at_next;
    }
    // The boundary may be unreachable along the dual path (nonconvex hard
    // case with the piecewise-linear term adapting).
    hard_case =
        std::abs(cur.step.norm() - qp.radius) > 1e-7 * qp.radius + 1e-12;
  } else if (nu_min > 0.0 && cur.step.norm() < qp.radius * (1.0 - 1e-9)) {
    hard_case = true;  // indefinite H with an interior penalized solution
  }

  if (hard_case) {
    std::optional<QpSolution> alt = enumerate_supports(hess, qp.cuts,
                                                       qp.radius);
    if (!alt) throw QpFailure("solve_tr_qp: hard case");
    return *alt;
  }

  QpSolution out;
  out.step = cur.step;
  out.alpha = cur.alpha;
  out.multipliers = cur.lam;
  out.tr_multiplier = nu;

  Vector stat = hess * out.step + 2.0 * out.tr_multiplier * out.step;
  for (int i = 0; i < num_cuts; ++i) {
    stat += out.multipliers(i) * qp.cuts[i].direction;
  }
  if (stat.norm() > 1e-6 * (1.0 + hess.norm()) ||
      out.multipliers.minCoeff() < -1e-10 ||
      std::abs(out.multipliers.sum() - 1.0) > 1e-8 ||
      out.step.norm() > qp.radius * (1.0 + 1e-10)) {
    throw QpFailure("solve_tr_qp: KKT verification failed");
  }
  return out;
}

}  // namespace admmdfo
