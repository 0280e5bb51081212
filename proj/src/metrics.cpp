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

#include "dcc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

void require_same_length(std::span<const int> a, std::span<const int> b, const char* op,
                         std::size_t min_len) {
  if (a.size() != b.size()) {
    throw ContractViolation(std::string(op) + ": label lengths differ (" +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < min_len) {
    throw ContractViolation(std::string(op) + ": need at least " + std::to_string(min_len) +
                            " labels");
  }
}

std::vector<int> compact(std::span<const int> labels, std::size_t& count) {
  std::map<int, int> codes;
  for (int l : labels) codes.emplace(l, 0);
  int next = 0;
  for (auto& [label, code] : codes) code = next++;
  count = codes.size();
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(codes[l]);
  return out;
}

double comb2(long long v) { return 0.5 * static_cast<double>(v) * static_cast<double>(v - 1); }

double entropy(const std::vector<long long>& counts, double n) {
  double h = 0.0;
  for (long long c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

Contingency Contingency::build(std::span<const int> truth, std::span<const int> predicted) {
  require_same_length(truth, predicted, "contingency", 0);
  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto t = compact(truth, rows);
  const auto p = compact(predicted, cols);
  Contingency c;
  c.u.assign(rows, std::vector<long long>(cols, 0));
  c.a.assign(rows, 0);
  c.b.assign(cols, 0);
  c.n = static_cast<long long>(truth.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++c.u[static_cast<std::size_t>(t[i])][static_cast<std::size_t>(p[i])];
    ++c.a[static_cast<std::size_t>(t[i])];
    ++c.b[static_cast<std::size_t>(p[i])];
  }
  return c;
}

double ari(std::span<const int> truth, std::span<const int> predicted) {
  require_same_length(truth, predicted, "ari", 2);
  const Contingency c = Contingency::build(truth, predicted);
  double index = 0.0;
  for (const auto& row : c.u) {
    for (long long v : row) index += comb2(v);
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (long long v : c.a) sum_a += comb2(v);
  for (long long v : c.b) sum_b += comb2(v);
  const double expected = sum_a * sum_b / comb2(c.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double nmi(std::span<const int> truth, std::span<const int> predicted) {
  require_same_length(truth, predicted, "nmi", 1);
  const Contingency c = Contingency::build(truth, predicted);
  const double n = static_cast<double>(c.n);
  const double h_true = entropy(c.a, n);
  const double h_pred = entropy(c.b, n);
  if (h_true == 0.0 && h_pred == 0.0) return 1.0;
  if (h_true == 0.0 || h_pred == 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    for (std::size_t j = 0; j < c.u[i].size(); ++j) {
      const long long v = c.u[i][j];
      if (v == 0) continue;
      const double pij = static_cast<double>(v) / n;
      mi += pij * std::log(n * static_cast<double>(v) /
                           (static_cast<double>(c.a[i]) * static_cast<double>(c.b[j])));
    }
  }
  return std::max(0.0, mi) / std::sqrt(h_true * h_pred);
}

double acc(std::span<const int> truth, std::span<const int> predicted) {
  require_same_length(truth, predicted, "acc", 1);
  const Contingency c = Contingency::build(truth, predicted);
  const std::size_t size = std::max(c.a.size(), c.b.size());
  // Rows are predicted clusters, columns true classes.
  std::vector<std::vector<long long>> w(size, std::vector<long long>(size, 0));
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    for (std::size_t j = 0; j < c.b.size(); ++j) w[j][i] = c.u[i][j];
  }
  const auto match = max_weight_assignment(w);
  long long hits = 0;
  for (std::size_t r = 0; r < size; ++r) hits += w[r][static_cast<std::size_t>(match[r])];
  return static_cast<double>(hits) / static_cast<double>(c.n);
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weights) {
  // Hungarian algorithm (potentials form) minimizing the negated weights.
  const std::size_t n = weights.size();
  for (const auto& row : weights) {
    if (row.size() != n) throw ContractViolation("assignment: weight matrix must be square");
  }
  if (n == 0) return {};
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      long long delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = -weights[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n, 0);
  for (std::size_t j = 1; j <= n; ++j) match[p[j] - 1] = static_cast<int>(j - 1);
  return match;
}

}  // namespace dcc
