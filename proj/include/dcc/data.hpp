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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dcc/numerics.hpp"

namespace dcc {

struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;  // 0..k-1, every value used
  std::vector<std::string> feature_names;

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
  int cluster_count() const;

  // Throws ContractViolation when labels and features disagree or labels
  // are not a contiguous 0-based range.
  void validate() const;
};

enum class Assignment { kIidRandom, kContiguous, kByClusterMap };

struct PartitionOptions {
  Assignment rows = Assignment::kIidRandom;
  // kByClusterMap is not meaningful for columns.
  Assignment columns = Assignment::kIidRandom;
  // Cluster id -> row blocks its points are spread over (kByClusterMap).
  std::map<int, std::vector<int>> cluster_to_rows;
  // When non-empty, used verbatim as the column blocks.
  std::vector<std::vector<Index>> explicit_columns;
};

// c x d lattice over a dataset: row_sets[i] are the data points of row
// block i and col_sets[j] the features of column block j, each ascending.
struct LatticePartition {
  int c = 0;
  int d = 0;
  std::vector<std::vector<Index>> row_sets;
  std::vector<std::vector<Index>> col_sets;

  // X_{i,j}.
  Matrix block(const Matrix& x, int i, int j) const;
  // All rows of x restricted to column block j (used for the anchor).
  Matrix column_block(const Matrix& x, int j) const;
  // Row indices of all blocks concatenated in block order.
  std::vector<Index> stacked_rows() const;
};

LatticePartition partition_lattice(const LabeledDataset& ds, int c, int d, Assignment assignment,
                                   std::uint64_t seed);
LatticePartition partition_lattice(const LabeledDataset& ds, int c, int d,
                                   const PartitionOptions& options, std::uint64_t seed);

// Inverse of slicing every block out of x; exact.
Matrix reassemble(const LatticePartition& p, const std::vector<std::vector<Matrix>>& blocks,
                  Index rows, Index cols);

inline constexpr double kBlobMinSeparation = 8.0;

// k isotropic unit-variance Gaussian blobs in two major features, followed
// by four minor features of correlated Gaussian noise (variance 0.1,
// covariance 0.01). Centers are uniform in [-10, 10]^2, redrawn until every
// pair is at least min_separation apart. Rows are grouped by blob.
LabeledDataset make_blobs(int k, int per_cluster, std::uint64_t seed,
                          double min_separation = kBlobMinSeparation);

// Concentric rings of radii 1, 0.6, 0.36, ... in the two major features
// with evenly spaced angles and Gaussian coordinate noise, plus the same
// four minor features as make_blobs.
LabeledDataset make_circles(int rings, int per_cluster, double noise_std, std::uint64_t seed);

inline constexpr double kCircleRadiusDecay = 0.6;
inline constexpr double kDefaultCircleNoise = 0.05;

// Reads a headered CSV. Every column except `label_column` must be numeric;
// labels are numbered in order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path, const std::string& label_column);

using FeatureBounds = std::vector<std::pair<double, double>>;

FeatureBounds feature_bounds(const Matrix& x);

struct AnchorDataset {
  Matrix features;  // r x m
};

// r points drawn i.i.d. uniform within the per-feature bounds.
AnchorDataset generate_anchor(const FeatureBounds& bounds, Index r, std::uint64_t seed);

}  // namespace dcc
