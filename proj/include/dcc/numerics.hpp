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

#include <Eigen/Dense>
#include <optional>
#include <string_view>

namespace dcc {

// Row = data point, column = feature.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

// Throws ContractViolation naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view what);

// Thin SVD, a = u * diag(s) * vt, with s nonincreasing.
//
// Sign convention: in every column of u the entry of largest magnitude is
// nonnegative (ties go to the lowest row index); the matching row of vt is
// flipped along with it. Identical input gives bit-identical output.
struct SvdResult {
  Matrix u;
  Vector s;
  Matrix vt;
};

SvdResult svd(const Matrix& a, std::optional<Index> top_k = std::nullopt);

// Moore-Penrose pseudo-inverse. Singular values at or below
// eps * max(rows, cols) * s_max are treated as zero.
Matrix pinv(const Matrix& a);

// Numerical rank with the same cutoff pinv uses.
Index numerical_rank(const Matrix& a);

// Eigenpairs of a symmetric matrix, eigenvalues ascending. Column j of
// `vectors` pairs with values(j) and follows the svd sign convention.
// Exactly repeated eigenvalues are ordered by their sign-fixed vectors,
// lexicographically.
struct EigResult {
  Vector values;
  Matrix vectors;
};

EigResult eig_symmetric(const Matrix& a);

// The `count` smallest eigenpairs only. Same conventions as eig_symmetric.
EigResult eig_symmetric_lowest(const Matrix& a, Index count);

// Per-column affine scaling fitted on one matrix and reusable on another.
struct Standardizer {
  RowVector means;
  RowVector scales;

  Matrix apply(const Matrix& a) const;
};

struct Standardized {
  Matrix values;
  Standardizer transform;
};

// Column-wise z-scores with the population standard deviation (divisor n).
// Zero-variance columns get scale 1, so they come out all zeros.
Standardized standardize(const Matrix& a);

}  // namespace dcc
