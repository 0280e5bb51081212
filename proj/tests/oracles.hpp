/*
 * Copyright 2026 The dc-cluster Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Brute-force reference implementations shared by the unit tests and the
// acceptance runner. Deliberately naive; small inputs only.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "dcc/numerics.hpp"

namespace dcc::oracle {

// ARI from explicit pair enumeration.
inline double ari(const std::vector<int>& t, const std::vector<int>& p) {
  const std::size_t n = t.size();
  double both = 0, same_t = 0, same_p = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool st = t[i] == t[j];
      const bool sp = p[i] == p[j];
      both += st && sp;
      same_t += st;
      same_p += sp;
      pairs += 1;
    }
  }
  const double expected = same_t * same_p / pairs;
  const double denom = 0.5 * (same_t + same_p) - expected;
  if (denom == 0.0) return 1.0;
  return (both - expected) / denom;
}

// NMI as (H(T) + H(P) - H(T,P)) / sqrt(H(T) H(P)), from joint frequencies.
inline double nmi(const std::vector<int>& t, const std::vector<int>& p) {
  const double n = static_cast<double>(t.size());
  std::map<int, double> ct, cp;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ct[t[i]] += 1;
    cp[p[i]] += 1;
    joint[{t[i], p[i]}] += 1;
  }
  auto h = [n](const auto& counts) {
    double s = 0;
    for (const auto& kv : counts) s -= kv.second / n * std::log(kv.second / n);
    return s;
  };
  const double ht = h(ct), hp = h(cp), hj = h(joint);
  if (ht == 0.0 && hp == 0.0) return 1.0;
  if (ht == 0.0 || hp == 0.0) return 0.0;
  return std::max(0.0, ht + hp - hj) / std::sqrt(ht * hp);
}

// ACC by trying every injective relabeling of predicted clusters.
inline double acc(const std::vector<int>& t, const std::vector<int>& p) {
  std::set<int> ts(t.begin(), t.end()), ps(p.begin(), p.end());
  std::vector<int> tl(ts.begin(), ts.end()), pl(ps.begin(), ps.end());
  const std::size_t size = std::max(tl.size(), pl.size());
  // Pad the true label list with labels nobody has.
  int spare = tl.empty() ? 0 : tl.back() + 1;
  while (tl.size() < size) tl.push_back(spare++);
  std::vector<std::size_t> perm(size);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::map<int, int> map;
    for (std::size_t k = 0; k < pl.size(); ++k) map[pl[k]] = tl[perm[k]];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < t.size(); ++i) hits += map[p[i]] == t[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(t.size());
}

inline double partition_cost(const Matrix& x, const std::vector<int>& labels, int k) {
  double cost = 0.0;
  for (int c = 0; c < k; ++c) {
    RowVector sum = RowVector::Zero(x.cols());
    int count = 0;
    for (Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        sum += x.row(i);
        ++count;
      }
    }
    if (count == 0) continue;
    const RowVector mean = sum / count;
    for (Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) cost += (x.row(i) - mean).squaredNorm();
    }
  }
  return cost;
}

// Global k-means optimum by enumerating all k^n assignments.
inline double best_partition_cost(const Matrix& x, int k) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, partition_cost(x, labels, k));
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace dcc::oracle
