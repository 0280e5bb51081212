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


// Seeded inputs shared by the unit tests and the acceptance runner.

#pragma once

#include <bit>
#include <cmath>
#include <vector>

#include <string>

#include "dcc/collaboration.hpp"
#include "dcc/random.hpp"
#include "dcc/wire.hpp"

namespace dcc::fixture {

inline Matrix uniform_matrix(Index rows, Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * uniform01(rng);
  }
  return m;
}

// Shares whose maps f_i(x) = (x - mu_i) F_1 Q_i all have the same range:
// the setting in which exact anchor agreement is achievable with affine g.
// With zero_offsets every mu_i is zero.
inline std::vector<UserShare> equal_range_shares(int c, Index r, Index m, Index m_tilde,
                                                 std::uint64_t seed, bool zero_offsets = false) {
  Rng rng(seed);
  const Matrix anchor = uniform_matrix(r, m, rng);
  const Matrix f1 = uniform_matrix(m, m_tilde, rng);
  std::vector<UserShare> shares;
  for (int i = 0; i < c; ++i) {
    Matrix q = uniform_matrix(m_tilde, m_tilde, rng);
    q.diagonal().array() += 3.0;  // keep Q_i well conditioned
    const RowVector mu = zero_offsets ? RowVector(RowVector::Zero(m))
                                      : RowVector(uniform_matrix(1, m, rng, -2.0, 2.0));
    const Matrix f = f1 * q;
    const Index n_i = 5 + i;
    const Matrix x = uniform_matrix(n_i, m, rng);
    UserShare s;
    s.party = PartyId{i, 0};
    s.x_tilde = (x.rowwise() - mu) * f;
    s.anchor_tilde = (anchor.rowwise() - mu) * f;
    shares.push_back(std::move(s));
  }
  return shares;
}

// Largest entrywise difference between row blocks' anchor images under g.
inline double anchor_disagreement(const CollaborationModel& model,
                                  const std::vector<UserShare>& shares) {
  double worst = 0.0;
  const Matrix first = model.g_maps[0].apply(shares[0].anchor_tilde);
  for (std::size_t i = 1; i < shares.size(); ++i) {
    const Matrix img = model.g_maps[i].apply(shares[i].anchor_tilde);
    worst = std::max(worst, (img - first).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

// Mixed-scale finite values, including exact zeros and negative zero.
inline Matrix wild_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const int pick = uniform_int(rng, 0, 5);
      const double u = uniform01(rng) * 2.0 - 1.0;
      m(i, j) = pick == 0 ? 0.0 : pick == 1 ? -0.0 : u * std::pow(10.0, uniform_int(rng, -300, 300));
    }
  }
  return m;
}

inline wire::Message random_message(Rng& rng) {
  const int kind = uniform_int(rng, 0, 2);
  if (kind == 0) {
    wire::ShareMessage s;
    s.share.party = PartyId{uniform_int(rng, 0, 20), uniform_int(rng, 0, 5)};
    const Index dim = uniform_int(rng, 0, 4);
    s.share.x_tilde = wild_matrix(uniform_int(rng, 0, 12), dim, rng);
    s.share.anchor_tilde = wild_matrix(uniform_int(rng, 0, 12), dim, rng);
    return s;
  }
  if (kind == 1) {
    wire::ResultMessage r;
    r.party = PartyId{uniform_int(rng, 0, 20), uniform_int(rng, 0, 5)};
    r.k = uniform_int(rng, 1, 6);
    r.mode = uniform01(rng) < 0.5 ? GMode::kLinear : GMode::kAffine;
    r.m_hat = uniform_int(rng, 0, 8);
    r.result.row = r.party.row;
    r.result.algorithm = uniform01(rng) < 0.5 ? Algorithm::kKMeans : Algorithm::kSpectral;
    const Index dim = uniform_int(rng, 0, 5);
    r.result.centroids = wild_matrix(r.k, dim, rng);
    r.result.z_block = wild_matrix(uniform_int(rng, 0, 12), dim, rng);
    return r;
  }
  wire::AbortMessage a;
  const int len = uniform_int(rng, 0, 40);
  for (int t = 0; t < len; ++t) a.reason.push_back(static_cast<char>(uniform_int(rng, 32, 126)));
  return a;
}

// Bitwise equality of matrices (so -0.0 and 0.0 differ).
inline bool same_bits(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (std::bit_cast<std::uint64_t>(a(i, j)) != std::bit_cast<std::uint64_t>(b(i, j))) {
        return false;
      }
    }
  }
  return true;
}

inline bool same_message(const wire::Message& a, const wire::Message& b) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<wire::ShareMessage>(&a)) {
    const auto& t = std::get<wire::ShareMessage>(b);
    return s->share.party == t.share.party && same_bits(s->share.x_tilde, t.share.x_tilde) &&
           same_bits(s->share.anchor_tilde, t.share.anchor_tilde);
  }
  if (const auto* r = std::get_if<wire::ResultMessage>(&a)) {
    const auto& t = std::get<wire::ResultMessage>(b);
    return r->party == t.party && r->k == t.k && r->mode == t.mode && r->m_hat == t.m_hat &&
           r->result.row == t.result.row && r->result.algorithm == t.result.algorithm &&
           same_bits(r->result.centroids, t.result.centroids) &&
           same_bits(r->result.z_block, t.result.z_block);
  }
  return std::get<wire::AbortMessage>(a).reason == std::get<wire::AbortMessage>(b).reason;
}

}  // namespace dcc::fixture
