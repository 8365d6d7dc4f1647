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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "admmdfo/linalg.hpp"

namespace admmdfo {

// Exact-match memo of black-box evaluations, keyed on the point's bit
// pattern. Re-requesting a stored point costs no oracle call, which is what
// makes model reuse across warm-started solves cheap.
class EvalMemo {
 public:
  explicit EvalMemo(std::function<double(const Vector&)> fn)
      : fn_(std::move(fn)) {}

  double value(const Vector& x) {
    const std::uint64_t h = hash_point(x);
    if (auto it = index_.find(h); it != index_.end()) {
      for (int id : it->second) {
        if (entries_[id].first == x) return entries_[id].second;
      }
    }
    const double v = fn_(x);
    entries_.emplace_back(x, v);
    index_[h].push_back(static_cast<int>(entries_.size()) - 1);
    ++misses_;
    return v;
  }

  // Stored points within `radius` of `center`, most recent first, with values
  // mapped through `transform(point, raw_value)`. Scans a bounded recency
  // window so long runs stay linear.
  std::vector<std::pair<Vector, double>> nearby(
      const Vector& center, double radius,
      const std::function<double(const Vector&, double)>& transform) const {
    std::vector<std::pair<Vector, double>> out;
    const int lo = std::max<int>(0, static_cast<int>(entries_.size()) -
                                        kScanWindow);
    for (int i = static_cast<int>(entries_.size()) - 1; i >= lo; --i) {
      const auto& [pt, raw] = entries_[i];
      if (pt.size() == center.size() && (pt - center).norm() <= radius) {
        out.emplace_back(pt, transform(pt, raw));
      }
    }
    return out;
  }

  long misses() const { return misses_; }
  std::size_t size() const { return entries_.size(); }

 private:
  static constexpr int kScanWindow = 4000;

  static std::uint64_t hash_point(const Vector& x) {
    std::uint64_t h = 1469598103934665603ull;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double v = x(i) == 0.0 ? 0.0 : x(i);  // fold -0.0 into +0.0
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      h = (h ^ bits) * 1099511628211ull;
    }
    return h;
  }

  std::function<double(const Vector&)> fn_;
  std::vector<std::pair<Vector, double>> entries_;
  std::unordered_map<std::uint64_t, std::vector<int>> index_;
  long misses_ = 0;
};

// What the trust-region solvers see: the full objective plus free access to
// previously evaluated nearby points.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual double operator()(const Vector& x) = 0;
  virtual std::vector<std::pair<Vector, double>> nearby(const Vector& center,
                                                        double radius) = 0;
};

// Oracle over a plain function with its own memo (used directly in tests and
// by standalone solves).
class FunctionOracle final : public Oracle {
 public:
  explicit FunctionOracle(std::function<double(const Vector&)> fn)
      : memo_(std::move(fn)) {}

  double operator()(const Vector& x) override { return memo_.value(x); }

  std::vector<std::pair<Vector, double>> nearby(const Vector& center,
                                                double radius) override {
    return memo_.nearby(center, radius,
                        [](const Vector&, double raw) { return raw; });
  }

  long evals() const { return memo_.misses(); }

 private:
  EvalMemo memo_;
};

}  // namespace admmdfo
