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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

namespace admmdfo {

double arwhead_eval(const Vector& u) {
  const Eigen::Index n = u.size();
  if (n < 2) throw InputError("arwhead_eval: dimension must be >= 2");
  const double last = u(n - 1);
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double q = u(i) * u(i) + last * last;
    total += q * q - 4.0 * u(i) + 3.0;
  }
  return total;
}

double rosenbrock_eval(const Vector& u) {
  const Eigen::Index n = u.size();
  if (n < 2) throw InputError("rosenbrock_eval: dimension must be >= 2");
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double a = u(i + 1) - u(i) * u(i);
    const double b = 1.0 - u(i);
    total += 100.0 * a * a + b * b;
  }
  return total;
}

DecomposedProblem decompose_arwhead(int n) {
  if (n < 2) throw InputError("decompose_arwhead: n must be >= 2");
  const int locals = n - 1;
  const int nb = (locals + 3) / 4;

  std::vector<LocalObjective> blocks;
  std::vector<Matrix> a;
  std::vector<Smoothness> hints;
  std::vector<int> starts(nb), sizes(nb);
  for (int i = 0; i < nb; ++i) {
    starts[i] = 4 * i;
    sizes[i] = std::min(4, locals - 4 * i);
  }
  for (int i = 0; i < nb; ++i) {
    const int s = sizes[i];
    blocks.emplace_back(s + 1, [s](const Vector& x) {
      const double v = x(s);
      double total = 0.0;
      for (int t = 0; t < s; ++t) {
        const double q = x(t) * x(t) + v * v;
        total += q * q - 4.0 * x(t) + 3.0;
      }
      return total;
    });
    Matrix a_i = Matrix::Zero(nb, s + 1);
    a_i(i, s) = 1.0;  // the block's copy of the shared variable
    a.push_back(std::move(a_i));
    hints.push_back(Smoothness::kSmooth);
  }
  Matrix b_mat = Matrix::Constant(nb, 1, -1.0);
  Vector b_vec = Vector::Zero(nb);

  DecomposedProblem out{
      BlockProblem(std::move(blocks), std::move(a), std::move(b_mat),
                   std::move(b_vec), std::move(hints)),
      n,
      [n, starts, sizes](const std::vector<Vector>& x, const Vector& x_bar) {
        Vector u(n);
        for (std::size_t i = 0; i < x.size(); ++i) {
          for (int t = 0; t < sizes[i]; ++t) u(starts[i] + t) = x[i](t);
        }
        u(n - 1) = x_bar(0);
        return u;
      },
      arwhead_eval};
  return out;
}

DecomposedProblem decompose_rosenbrock(int n) {
  if (n < 2) throw InputError("decompose_rosenbrock: n must be >= 2");
  const int terms = n - 1;
  const int nb = (terms + 2) / 3;  // term i belongs to block i/3

  std::vector<int> starts(nb), sizes(nb);
  for (int w = 0; w < nb; ++w) {
    starts[w] = 3 * w;
    sizes[w] = std::min(3 * w + 4, n) - 3 * w;
  }
  const int overlaps = nb - 1;  // variable 3(w+1) is shared by blocks w, w+1

  std::vector<LocalObjective> blocks;
  std::vector<Matrix> a;
  std::vector<Smoothness> hints;
  for (int w = 0; w < nb; ++w) {
    const int lo_term = 3 * w;
    const int hi_term = std::min(3 * w + 3, terms);
    const int local_terms = hi_term - lo_term;
    blocks.emplace_back(sizes[w], [local_terms](const Vector& x) {
      double total = 0.0;
      for (int t = 0; t < local_terms; ++t) {
        const double d = x(t + 1) - x(t) * x(t);
        const double e = 1.0 - x(t);
        total += 100.0 * d * d + e * e;
      }
      return total;
    });
    Matrix a_w = Matrix::Zero(2 * overlaps, sizes[w]);
    if (w > 0) a_w(2 * (w - 1) + 1, 0) = 1.0;      // right copy of overlap w-1
    if (w < nb - 1) a_w(2 * w, 3) = 1.0;           // left copy of overlap w
    a.push_back(std::move(a_w));
    hints.push_back(Smoothness::kSmooth);
  }
  Matrix b_mat = Matrix::Zero(2 * overlaps, overlaps);
  for (int j = 0; j < overlaps; ++j) {
    b_mat(2 * j, j) = -1.0;
    b_mat(2 * j + 1, j) = -1.0;
  }
  Vector b_vec = Vector::Zero(2 * overlaps);

  DecomposedProblem out{
      BlockProblem(std::move(blocks), std::move(a), std::move(b_mat),
                   std::move(b_vec), std::move(hints)),
      n,
      [n, starts, sizes, overlaps](const std::vector<Vector>& x,
                                   const Vector& x_bar) {
        Vector u(n);
        for (std::size_t w = 0; w < x.size(); ++w) {
          for (int t = 0; t < sizes[w]; ++t) u(starts[w] + t) = x[w](t);
        }
        for (int j = 0; j < overlaps; ++j) u(3 * (j + 1)) = x_bar(j);
        return u;
      },
      rosenbrock_eval};
  return out;
}

BanknoteSplit load_banknote(const std::string& path, std::uint64_t seed,
                            int num_agents) {
  if (num_agents < 1) throw InputError("load_banknote: num_agents must be >= 1");
  std::ifstream in(path);
  if (!in) throw InputError("load_banknote: cannot open " + path);

  std::vector<Vector> rows;
  std::vector<double> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vector feat(4);
    double label = 0.0;
    char comma = 0;
    if (!(ls >> feat(0) >> comma >> feat(1) >> comma >> feat(2) >> comma >>
          feat(3) >> comma >> label)) {
      throw InputError("load_banknote: parse failure at line " +
                       std::to_string(line_no));
    }
    if (label != 0.0 && label != 1.0) {
      throw InputError("load_banknote: label not in {0,1} at line " +
                       std::to_string(line_no));
    }
    rows.push_back(std::move(feat));
    labels.push_back(label == 0.0 ? -1.0 : 1.0);
  }
  const int count = static_cast<int>(rows.size());
  int train_total = 1000;
  if (count != 1372) {
    std::cerr << "load_banknote: expected 1372 rows, found " << count
              << "; using a proportional split\n";
    train_total = static_cast<int>(static_cast<long>(count) * 1000 / 1372);
  }
  train_total -= train_total % num_agents;
  if (train_total < num_agents || count <= train_total) {
    throw InputError("load_banknote: not enough rows to split");
  }

  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  BanknoteSplit split;
  const int per_agent = train_total / num_agents;
  split.agents.resize(num_agents);
  for (int a = 0; a < num_agents; ++a) {
    split.agents[a].features.resize(4, per_agent);
    split.agents[a].labels.resize(per_agent);
    for (int j = 0; j < per_agent; ++j) {
      const int id = order[a * per_agent + j];
      split.agents[a].features.col(j) = rows[id];
      split.agents[a].labels(j) = labels[id];
    }
  }
  const int n_val = count - train_total;
  split.val_features.resize(4, n_val);
  split.val_labels.resize(n_val);
  for (int j = 0; j < n_val; ++j) {
    const int id = order[train_total + j];
    split.val_features.col(j) = rows[id];
    split.val_labels(j) = labels[id];
  }
  return split;
}

namespace {

constexpr int kFeatureDim = 4;
constexpr int kHiddenUnits = 2;
constexpr int kWeightDim = kHiddenUnits * (kFeatureDim + 1);  // 10

double nn_predict(const Vector& x, const Vector& u) {
  double out = 0.0;
  for (int h = 0; h < kHiddenUnits; ++h) {
    double pre = 0.0;
    for (int f = 0; f < kFeatureDim; ++f) {
      pre += x(h * kFeatureDim + f) * u(f);  // vec(Z) column-major
    }
    out += x(kHiddenUnits * kFeatureDim + h) * std::max(0.0, pre);
  }
  return out;
}

}  // namespace

double nn_local_loss(const Vector& x, const AgentData& data,
                     double weight_decay, int num_agents) {
  if (x.size() != kWeightDim) {
    throw InputError("nn_local_loss: weight vector must have length 10");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < data.labels.size(); ++j) {
    const double err = data.labels(j) - nn_predict(x, data.features.col(j));
    total += err * err;
  }
  total += weight_decay * x.squaredNorm();
  return total / (2.0 * num_agents);
}

double validation_accuracy(const Vector& weights, const Matrix& features,
                           const Vector& labels) {
  if (weights.size() != kWeightDim) {
    throw InputError("validation_accuracy: weight vector must have length 10");
  }
  if (labels.size() == 0) return 0.0;
  long hits = 0;
  for (Eigen::Index j = 0; j < labels.size(); ++j) {
    const double pred = nn_predict(weights, features.col(j));
    const double sign = pred >= 0.0 ? 1.0 : -1.0;
    if (sign == labels(j)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

DecomposedProblem make_banknote_consensus(const BanknoteSplit& split,
                                          double weight_decay) {
  const int num_agents = static_cast<int>(split.agents.size());
  if (num_agents < 1) throw InputError("make_banknote_consensus: no agents");
  const int m = num_agents * kWeightDim;

  std::vector<LocalObjective> blocks;
  std::vector<Matrix> a;
  std::vector<Smoothness> hints;
  for (int i = 0; i < num_agents; ++i) {
    AgentData data = split.agents[i];
    blocks.emplace_back(kWeightDim, [data = std::move(data), weight_decay,
                                     num_agents](const Vector& x) {
      return nn_local_loss(x, data, weight_decay, num_agents);
    });
    Matrix a_i = Matrix::Zero(m, kWeightDim);
    a_i.block(i * kWeightDim, 0, kWeightDim, kWeightDim) =
        Matrix::Identity(kWeightDim, kWeightDim);
    a.push_back(std::move(a_i));
    hints.push_back(Smoothness::kNonsmooth);
  }
  Matrix b_mat = Matrix::Zero(m, kWeightDim);
  for (int i = 0; i < num_agents; ++i) {
    b_mat.block(i * kWeightDim, 0, kWeightDim, kWeightDim) =
        -Matrix::Identity(kWeightDim, kWeightDim);
  }
  Vector b_vec = Vector::Zero(m);

  DecomposedProblem out{
      BlockProblem(std::move(blocks), std::move(a), std::move(b_mat),
                   std::move(b_vec), std::move(hints)),
      kWeightDim,
      [](const std::vector<Vector>&, const Vector& x_bar) { return x_bar; },
      // No scalar monolithic objective; report the consensus average loss.
      [split, weight_decay, num_agents](const Vector& w) {
        double total = 0.0;
        for (const auto& agent : split.agents) {
          total += nn_local_loss(w, agent, weight_decay, num_agents);
        }
        return total;
      }};
  return out;
}

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& fn,
                             const Vector& x0, double target, long max_evals) {
  const int n = static_cast<int>(x0.size());
  if (max_evals < n + 1) {
    throw InputError("nelder_mead: budget below the initial simplex size");
  }
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5,
                   kShrink = 0.5;
  constexpr double kNonZeroDelta = 0.05, kZeroDelta = 0.00025;

  NelderMeadResult out;
  long evals = 0;
  auto eval = [&](const Vector& x) {
    ++evals;
    return fn(x);
  };

  std::vector<Vector> sim(n + 1, x0);
  std::vector<double> f(n + 1);
  for (int i = 0; i < n; ++i) {
    if (sim[i + 1](i) != 0.0) {
      sim[i + 1](i) *= 1.0 + kNonZeroDelta;
    } else {
      sim[i + 1](i) = kZeroDelta;
    }
  }
  for (int i = 0; i <= n; ++i) f[i] = eval(sim[i]);

  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto resort = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return f[a] < f[b]; });
  };
  resort();

  Vector sum = Vector::Zero(n);
  for (const auto& v : sim) sum += v;
  long iter = 0;

  while (f[order[0]] > target && evals < max_evals) {
    if (++iter % 1024 == 0) {  // refresh the running sum against drift
      sum.setZero();
      for (const auto& v : sim) sum += v;
    }
    const int worst = order[n];
    const Vector centroid = (sum - sim[worst]) / n;
    const Vector xr = centroid + kReflect * (centroid - sim[worst]);
    const double fr = eval(xr);

    Vector replacement;
    double f_replacement;
    bool shrink = false;
    if (fr < f[order[0]]) {
      const Vector xe = centroid + kReflect * kExpand * (centroid - sim[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        replacement = xe;
        f_replacement = fe;
      } else {
        replacement = xr;
        f_replacement = fr;
      }
    } else if (fr < f[order[n - 1]]) {
      replacement = xr;
      f_replacement = fr;
    } else if (fr < f[worst]) {
      const Vector xc =
          centroid + kContract * kReflect * (centroid - sim[worst]);
      const double fc = eval(xc);
      if (fc <= fr) {
        replacement = xc;
        f_replacement = fc;
      } else {
        shrink = true;
      }
    } else {
      const Vector xcc = centroid - kContract * (centroid - sim[worst]);
      const double fcc = eval(xcc);
      if (fcc < f[worst]) {
        replacement = xcc;
        f_replacement = fcc;
      } else {
        shrink = true;
      }
    }

    if (shrink) {
      const Vector best = sim[order[0]];
      for (int j = 0; j <= n; ++j) {
        if (j == order[0]) continue;
        sim[j] = best + kShrink * (sim[j] - best);
        f[j] = eval(sim[j]);
        if (evals >= max_evals) break;
      }
      sum.setZero();
      for (const auto& v : sim) sum += v;
      resort();
      continue;
    }

    sum += replacement - sim[worst];
    sim[worst] = replacement;
    f[worst] = f_replacement;
    // One value changed: restore order with a single insertion.
    int pos = n;
    while (pos > 0 && f[order[pos - 1]] > f_replacement) {
      order[pos] = order[pos - 1];
      --pos;
    }
    order[pos] = worst;
  }

  out.x = sim[order[0]];
  out.f = f[order[0]];
  out.evals = evals;
  out.reached_target = out.f <= target;
  return out;
}

}  // namespace admmdfo
