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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcc/clustering.hpp"
#include "dcc/data.hpp"
#include "dcc/numerics.hpp"

namespace dcc {

// x -> (x - 1*pre_offset) * linear + 1*post_offset. The intermediate map f
// only uses pre_offset, the collaborative map g only post_offset; the unused
// one is a zero vector.
struct AffineMap {
  RowVector pre_offset;
  Matrix linear;  // in_dim x out_dim
  RowVector post_offset;

  Index in_dim() const { return linear.rows(); }
  Index out_dim() const { return linear.cols(); }
  Matrix apply(const Matrix& x) const;
};

// Lattice position of a user, 0-based.
struct PartyId {
  int row = 0;
  int col = 0;

  auto operator<=>(const PartyId&) const = default;
  std::string to_string() const;  // 1-based "(i,j)" for messages
};

// What a user uploads: its intermediate representation and that of the
// anchor under the same map. Nothing else leaves the user.
struct UserShare {
  PartyId party;
  Matrix x_tilde;       // n_i x m~
  Matrix anchor_tilde;  // r x m~
};

struct Intermediate {
  AffineMap f;  // stays with the user
  UserShare share;
};

enum class IntermediateKind {
  kStandardizePca,  // z-score each column, then PCA
  kCenterPca,       // subtract column means only, then PCA
};

// Standardization followed by PCA onto the top target_dim components,
// fitted on x_block and applied to both x_block and anchor_block.
Intermediate fit_intermediate(PartyId party, const Matrix& x_block, const Matrix& anchor_block,
                              Index target_dim,
                              IntermediateKind kind = IntermediateKind::kStandardizePca);

enum class GMode { kLinear, kAffine };

struct CollaborationModel {
  std::vector<AffineMap> g_maps;  // one per row block
  Index m_hat = 0;
  Matrix x_hat;  // row blocks stacked in order
  GMode mode = GMode::kAffine;
  std::vector<Index> row_block_sizes;
  // max over row pairs of ||g_i(A_i) - g_l(A_l)||_F / max(||g_i(A_i)||_F, ||g_l(A_l)||_F)
  double alignment_residual = 0.0;
  std::vector<std::string> warnings;
};

// Default collaborative dimension: min_i m~_i, plus one in affine mode to
// account for the constant column.
Index default_m_hat(const std::vector<Index>& row_dims, GMode mode);

// Needs exactly one share per lattice position and a common anchor size.
CollaborationModel build_collaboration(const std::vector<UserShare>& shares, GMode mode,
                                       std::optional<Index> m_hat = std::nullopt);

enum class Algorithm { kKMeans, kSpectral };

// Z = X^ for k-means, the spectral embedding of X^ otherwise.
Matrix make_clustering_representation(const CollaborationModel& model, Algorithm algorithm, int k,
                                      int neighbors, bool normalize_rows = false);

struct AnalystResult {
  int row = 0;
  Matrix centroids;  // k x dim(Z)
  Matrix z_block;    // Z_i
  Algorithm algorithm = Algorithm::kKMeans;
};

struct AnalystOutcome {
  ClusterModel model;
  std::vector<AnalystResult> results;  // one per row block
};

AnalystOutcome analyst_cluster(const Matrix& z, int k, int max_iter, std::uint64_t seed,
                               const std::vector<Index>& row_block_sizes, Algorithm algorithm,
                               int n_init = 1);

// Nearest centroid per row of Z_i, ties to the lowest index.
std::vector<int> user_recover_labels(const AnalystResult& result);

struct DcConfig {
  Algorithm algorithm = Algorithm::kKMeans;
  GMode mode = GMode::kAffine;
  int k = 2;
  int neighbors = kDefaultNeighbors;
  int max_iter = kDefaultMaxIter;
  int n_init = 1;  // k-means restarts on Z
  std::uint64_t seed = 0;
  std::optional<Index> m_hat;
  bool normalize_rows = false;
  // Per column block; m_j - 1 when empty.
  std::vector<Index> target_dims;
  IntermediateKind intermediate = IntermediateKind::kStandardizePca;
};

Index intermediate_dim(const DcConfig& cfg, int col, Index block_cols);
std::uint64_t analyst_seed(std::uint64_t master);

struct DcOutcome {
  std::vector<int> labels;                // original row order
  std::vector<std::vector<int>> row_labels;  // per row block, as recovered by users
  CollaborationModel model;
  ClusterModel analyst_model;
};

DcOutcome run_dc_clustering(const Matrix& x, const LatticePartition& partition,
                            const AnchorDataset& anchor, const DcConfig& cfg);

const char* to_string(Algorithm a);
const char* to_string(GMode m);
const char* to_string(IntermediateKind k);
Algorithm parse_algorithm(const std::string& s);
IntermediateKind parse_intermediate(const std::string& s);
GMode parse_mode(const std::string& s);

}  // namespace dcc
