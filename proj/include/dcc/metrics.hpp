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

#pragma once

#include <span>
#include <vector>

namespace dcc {

// Cross-tabulation of two labelings; labels are compacted to 0-based
// indices in ascending order of their original values.
struct Contingency {
  std::vector<std::vector<long long>> u;  // u[i][j]: truth i, predicted j
  std::vector<long long> a;               // row sums
  std::vector<long long> b;               // column sums
  long long n = 0;

  static Contingency build(std::span<const int> truth, std::span<const int> predicted);
};

// Adjusted Rand index. 1.0 when the chance-corrected denominator vanishes
// (e.g. both labelings put everything in one cluster).
double ari(std::span<const int> truth, std::span<const int> predicted);

// Mutual information normalized by the geometric mean of the entropies.
// 1.0 if both labelings are a single cluster, 0.0 if only one of them is.
double nmi(std::span<const int> truth, std::span<const int> predicted);

// Best-matching accuracy over one-to-one label mappings (Hungarian method on
// the zero-padded contingency table).
double acc(std::span<const int> truth, std::span<const int> predicted);

// Maximum-weight perfect matching on a square matrix. Returns, for each row,
// the column it is matched to.
std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weights);

}  // namespace dcc
