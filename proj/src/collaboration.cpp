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

#include "dcc/collaboration.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "dcc/errors.hpp"
#include "dcc/random.hpp"

namespace dcc {

namespace {

Matrix with_ones(const Matrix& a) {
  Matrix out(a.rows(), a.cols() + 1);
  out.leftCols(a.cols()) = a;
  out.col(a.cols()).setOnes();
  return out;
}

Matrix hstack(const std::vector<const Matrix*>& parts) {
  Index cols = 0;
  for (const Matrix* p : parts) cols += p->cols();
  const Index rows = parts.empty() ? 0 : parts.front()->rows();
  Matrix out(rows, cols);
  Index at = 0;
  for (const Matrix* p : parts) {
    out.middleCols(at, p->cols()) = *p;
    at += p->cols();
  }
  return out;
}

}  // namespace

Matrix AffineMap::apply(const Matrix& x) const {
  if (x.cols() != in_dim()) {
    throw ContractViolation("affine map expects " + std::to_string(in_dim()) + " columns, got " +
                            std::to_string(x.cols()));
  }
  Matrix out = (x.rowwise() - pre_offset) * linear;
  out.rowwise() += post_offset;
  return out;
}

std::string PartyId::to_string() const {
  return "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
}

Intermediate fit_intermediate(PartyId party, const Matrix& x_block, const Matrix& anchor_block,
                              Index target_dim, IntermediateKind kind) {
  const Index m = x_block.cols();
  if (target_dim < 1 || target_dim >= m) {
    throw ContractViolation("fit_intermediate " + party.to_string() + ": target_dim " +
                            std::to_string(target_dim) + " must lie in [1, " +
                            std::to_string(m - 1) + "]");
  }
  if (anchor_block.cols() != m) {
    throw ContractViolation("fit_intermediate " + party.to_string() + ": anchor has " +
                            std::to_string(anchor_block.cols()) + " columns, block has " +
                            std::to_string(m));
  }
  if (target_dim > x_block.rows()) {
    throw ContractViolation("fit_intermediate " + party.to_string() + ": only " +
                            std::to_string(x_block.rows()) + " rows for " +
                            std::to_string(target_dim) + " components");
  }
  require_finite(x_block, "fit_intermediate");
  require_finite(anchor_block, "fit_intermediate anchor");

  Standardized z = standardize(x_block);
  if (kind == IntermediateKind::kCenterPca) {
    z.transform.scales.setOnes();
    z.values = z.transform.apply(x_block);
  }
  const SvdResult dec = svd(z.values, target_dim);

  Intermediate out;
  out.f.pre_offset = z.transform.means;
  out.f.linear = z.transform.scales.cwiseInverse().asDiagonal() * dec.vt.transpose();
  out.f.post_offset = RowVector::Zero(target_dim);
  out.share.party = party;
  out.share.x_tilde = out.f.apply(x_block);
  out.share.anchor_tilde = out.f.apply(anchor_block);
  return out;
}

Index default_m_hat(const std::vector<Index>& row_dims, GMode mode) {
  if (row_dims.empty()) throw ContractViolation("default_m_hat: no row blocks");
  const Index base = *std::min_element(row_dims.begin(), row_dims.end());
  return mode == GMode::kAffine ? base + 1 : base;
}

CollaborationModel build_collaboration(const std::vector<UserShare>& shares, GMode mode,
                                       std::optional<Index> m_hat) {
  if (shares.empty()) throw ProtocolError("build_collaboration: no shares");

  std::map<PartyId, const UserShare*> by_party;
  int c = 0;
  int d = 0;
  for (const UserShare& s : shares) {
    if (s.party.row < 0 || s.party.col < 0) {
      throw ProtocolError("build_collaboration: negative party index");
    }
    if (!by_party.emplace(s.party, &s).second) {
      throw ProtocolError("build_collaboration: duplicate share from party " +
                          s.party.to_string());
    }
    c = std::max(c, s.party.row + 1);
    d = std::max(d, s.party.col + 1);
  }
  if (by_party.size() != static_cast<std::size_t>(c) * static_cast<std::size_t>(d)) {
    std::string missing;
    for (int i = 0; i < c; ++i) {
      for (int j = 0; j < d; ++j) {
        if (!by_party.count(PartyId{i, j})) missing += " " + PartyId{i, j}.to_string();
      }
    }
    throw ProtocolError("build_collaboration: missing shares from" + missing);
  }

  const Index r = shares.front().anchor_tilde.rows();
  for (const UserShare& s : shares) {
    if (s.anchor_tilde.rows() != r) {
      throw ProtocolError("build_collaboration: party " + s.party.to_string() + " anchor has " +
                          std::to_string(s.anchor_tilde.rows()) + " rows, expected " +
                          std::to_string(r));
    }
    if (s.x_tilde.cols() != s.anchor_tilde.cols()) {
      throw ProtocolError("build_collaboration: party " + s.party.to_string() +
                          " data and anchor dimensions differ");
    }
    require_finite(s.x_tilde, "build_collaboration");
    require_finite(s.anchor_tilde, "build_collaboration");
  }

  // Concatenate each row's shares in column order.
  std::vector<Matrix> x_rows(static_cast<std::size_t>(c));
  std::vector<Matrix> anchor_rows(static_cast<std::size_t>(c));
  std::vector<Index> row_dims;
  for (int i = 0; i < c; ++i) {
    std::vector<const Matrix*> xs;
    std::vector<const Matrix*> as;
    const Index n_i = by_party.at(PartyId{i, 0})->x_tilde.rows();
    for (int j = 0; j < d; ++j) {
      const UserShare* s = by_party.at(PartyId{i, j});
      if (s->x_tilde.rows() != n_i) {
        throw ProtocolError("build_collaboration: row block " + std::to_string(i + 1) +
                            " has inconsistent point counts");
      }
      xs.push_back(&s->x_tilde);
      as.push_back(&s->anchor_tilde);
    }
    x_rows[static_cast<std::size_t>(i)] = hstack(xs);
    anchor_rows[static_cast<std::size_t>(i)] = hstack(as);
    row_dims.push_back(x_rows[static_cast<std::size_t>(i)].cols());
  }

  std::vector<Matrix> systems;  // A_i or [A_i, 1]
  for (const Matrix& a : anchor_rows) {
    systems.push_back(mode == GMode::kAffine ? with_ones(a) : a);
  }
  std::vector<const Matrix*> parts;
  for (const Matrix& s : systems) parts.push_back(&s);
  const Matrix stacked = hstack(parts);

  CollaborationModel model;
  model.mode = mode;
  Index want = m_hat.value_or(default_m_hat(row_dims, mode));
  if (want < 1) throw ContractViolation("build_collaboration: m_hat must be positive");
  Index limit = std::min(stacked.rows(), stacked.cols());
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const Index rank = numerical_rank(systems[i]);
    if (rank < want) {
      model.warnings.push_back("row block " + std::to_string(i + 1) + " anchor rank " +
                               std::to_string(rank) + " < m_hat " + std::to_string(want));
    }
    limit = std::min(limit, rank);
  }
  if (limit < 1) throw NumericFailure("build_collaboration: anchor representations have rank 0");
  if (want > limit) {
    model.warnings.push_back("m_hat clamped from " + std::to_string(want) + " to " +
                             std::to_string(limit));
    want = limit;
  }
  model.m_hat = want;

  const Matrix u1 = svd(stacked, want).u;

  std::vector<Matrix> anchor_images;
  for (int i = 0; i < c; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Matrix solution = pinv(systems[ui]) * u1;
    AffineMap g;
    const Index m_i = row_dims[ui];
    g.pre_offset = RowVector::Zero(m_i);
    g.linear = solution.topRows(m_i);
    g.post_offset = mode == GMode::kAffine ? RowVector(solution.row(m_i))
                                           : RowVector(RowVector::Zero(want));
    anchor_images.push_back(g.apply(anchor_rows[ui]));
    model.g_maps.push_back(std::move(g));
  }

  Index n = 0;
  for (const Matrix& x : x_rows) n += x.rows();
  model.x_hat.resize(n, want);
  Index at = 0;
  for (int i = 0; i < c; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Index n_i = x_rows[ui].rows();
    model.x_hat.middleRows(at, n_i) = model.g_maps[ui].apply(x_rows[ui]);
    model.row_block_sizes.push_back(n_i);
    at += n_i;
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < anchor_images.size(); ++i) {
    for (std::size_t l = i + 1; l < anchor_images.size(); ++l) {
      const double scale = std::max(anchor_images[i].norm(), anchor_images[l].norm());
      if (scale == 0.0) continue;
      residual = std::max(residual, (anchor_images[i] - anchor_images[l]).norm() / scale);
    }
  }
  model.alignment_residual = residual;
  return model;
}

Matrix make_clustering_representation(const CollaborationModel& model, Algorithm algorithm, int k,
                                      int neighbors, bool normalize_rows) {
  if (algorithm == Algorithm::kKMeans) return model.x_hat;
  Matrix e = spectral_embedding(model.x_hat, k, neighbors).e;
  if (normalize_rows) {
    for (Index i = 0; i < e.rows(); ++i) {
      const double norm = e.row(i).norm();
      if (norm > 0.0) e.row(i) /= norm;
    }
  }
  return e;
}

AnalystOutcome analyst_cluster(const Matrix& z, int k, int max_iter, std::uint64_t seed,
                               const std::vector<Index>& row_block_sizes, Algorithm algorithm,
                               int n_init) {
  Index total = 0;
  for (Index s : row_block_sizes) {
    if (s < 0) throw ContractViolation("analyst_cluster: negative row block size");
    total += s;
  }
  if (total != z.rows()) {
    throw ContractViolation("analyst_cluster: row blocks cover " + std::to_string(total) +
                            " rows, Z has " + std::to_string(z.rows()));
  }
  AnalystOutcome out;
  out.model = kmeans(z, k, max_iter, seed, n_init);
  out.model.space = algorithm == Algorithm::kSpectral ? Space::kSpectralEmbedding
                                                      : Space::kCollaborative;
  Index at = 0;
  for (std::size_t i = 0; i < row_block_sizes.size(); ++i) {
    AnalystResult r;
    r.row = static_cast<int>(i);
    r.centroids = out.model.centroids;
    r.z_block = z.middleRows(at, row_block_sizes[i]);
    r.algorithm = algorithm;
    out.results.push_back(std::move(r));
    at += row_block_sizes[i];
  }
  return out;
}

std::vector<int> user_recover_labels(const AnalystResult& result) {
  if (result.z_block.rows() == 0) return {};
  return assign_nearest(result.z_block, result.centroids);
}

Index intermediate_dim(const DcConfig& cfg, int col, Index block_cols) {
  if (!cfg.target_dims.empty()) {
    if (static_cast<std::size_t>(col) >= cfg.target_dims.size()) {
      throw ConfigError("target dimensions given for " + std::to_string(cfg.target_dims.size()) +
                        " column blocks, need block " + std::to_string(col + 1));
    }
    return cfg.target_dims[static_cast<std::size_t>(col)];
  }
  return block_cols - 1;
}

std::uint64_t analyst_seed(std::uint64_t master) { return derive_seed(master, "analyst"); }

DcOutcome run_dc_clustering(const Matrix& x, const LatticePartition& partition,
                            const AnchorDataset& anchor, const DcConfig& cfg) {
  if (anchor.features.cols() != x.cols()) {
    throw ContractViolation("run_dc_clustering: anchor has " +
                            std::to_string(anchor.features.cols()) + " features, data has " +
                            std::to_string(x.cols()));
  }
  std::vector<UserShare> shares;
  for (int i = 0; i < partition.c; ++i) {
    for (int j = 0; j < partition.d; ++j) {
      const Matrix block = partition.block(x, i, j);
      const Matrix anchor_block = partition.column_block(anchor.features, j);
      shares.push_back(
          fit_intermediate(PartyId{i, j}, block, anchor_block,
                           intermediate_dim(cfg, j, block.cols()), cfg.intermediate)
              .share);
    }
  }

  DcOutcome out;
  out.model = build_collaboration(shares, cfg.mode, cfg.m_hat);
  const Matrix z = make_clustering_representation(out.model, cfg.algorithm, cfg.k, cfg.neighbors,
                                                  cfg.normalize_rows);
  AnalystOutcome analyst = analyst_cluster(z, cfg.k, cfg.max_iter, analyst_seed(cfg.seed),
                                           out.model.row_block_sizes, cfg.algorithm, cfg.n_init);
  out.analyst_model = std::move(analyst.model);

  out.labels.assign(static_cast<std::size_t>(x.rows()), -1);
  for (const AnalystResult& r : analyst.results) {
    std::vector<int> recovered = user_recover_labels(r);
    const auto& rows = partition.row_sets[static_cast<std::size_t>(r.row)];
    for (std::size_t t = 0; t < rows.size(); ++t) {
      out.labels[static_cast<std::size_t>(rows[t])] = recovered[t];
    }
    out.row_labels.push_back(std::move(recovered));
  }
  return out;
}

const char* to_string(Algorithm a) { return a == Algorithm::kKMeans ? "kmeans" : "spectral"; }

const char* to_string(GMode m) { return m == GMode::kLinear ? "linear" : "affine"; }

const char* to_string(IntermediateKind k) {
  return k == IntermediateKind::kStandardizePca ? "standardize-pca" : "center-pca";
}

IntermediateKind parse_intermediate(const std::string& s) {
  if (s == "standardize-pca") return IntermediateKind::kStandardizePca;
  if (s == "center-pca") return IntermediateKind::kCenterPca;
  throw ConfigError("unknown intermediate '" + s + "' (expected standardize-pca or center-pca)");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "kmeans") return Algorithm::kKMeans;
  if (s == "spectral") return Algorithm::kSpectral;
  throw ConfigError("unknown algorithm '" + s + "' (expected kmeans or spectral)");
}

GMode parse_mode(const std::string& s) {
  if (s == "linear") return GMode::kLinear;
  if (s == "affine") return GMode::kAffine;
  throw ConfigError("unknown mode '" + s + "' (expected linear or affine)");
}

}  // namespace dcc
