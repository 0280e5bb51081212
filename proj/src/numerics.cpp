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

#include "dcc/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

// Flips columns of `vecs` so that each one's largest-magnitude entry is
// nonnegative. Returns the flip applied to each column (+1 or -1).
std::vector<double> fix_signs(Matrix& vecs) {
  std::vector<double> flips(static_cast<std::size_t>(vecs.cols()), 1.0);
  for (Index j = 0; j < vecs.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vecs.rows(); ++i) {
      const double mag = std::abs(vecs(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (vecs.rows() > 0 && vecs(arg, j) < 0.0) {
      vecs.col(j) = -vecs.col(j);
      flips[static_cast<std::size_t>(j)] = -1.0;
    }
  }
  return flips;
}

double pinv_cutoff(const Matrix& a, double s_max) {
  const double rcond =
      std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(a.rows(), a.cols()));
  return rcond * s_max;
}

EigResult order_and_fix(Vector values, Matrix vectors) {
  fix_signs(vectors);
  const Index n = values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) {
    if (values(l) != values(r)) return values(l) < values(r);
    for (Index i = 0; i < vectors.rows(); ++i) {
      if (vectors(i, l) != vectors(i, r)) return vectors(i, l) < vectors(i, r);
    }
    return false;
  });
  EigResult out{Vector(n), Matrix(vectors.rows(), n)};
  for (Index j = 0; j < n; ++j) {
    out.values(j) = values(order[static_cast<std::size_t>(j)]);
    out.vectors.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

Matrix symmetric_part(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw ContractViolation(std::string(op) + ": matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
  }
  require_finite(a, op);
  return 0.5 * (a + a.transpose());
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw ContractViolation(std::string(what) + ": matrix contains NaN or Inf");
  }
}

SvdResult svd(const Matrix& a, std::optional<Index> top_k) {
  require_finite(a, "svd");
  const Index full = std::min(a.rows(), a.cols());
  const Index keep = top_k.value_or(full);
  if (keep < 0 || keep > full) {
    throw ContractViolation("svd: top_k=" + std::to_string(keep) + " exceeds min(rows, cols)=" +
                            std::to_string(full));
  }
  if (full == 0) {
    return {Matrix(a.rows(), 0), Vector(0), Matrix(0, a.cols())};
  }
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> solver(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw NumericFailure("svd: decomposition did not converge");
  }
  Matrix u = solver.matrixU().leftCols(keep);
  Matrix v = solver.matrixV().leftCols(keep);
  const auto flips = fix_signs(u);
  for (Index j = 0; j < keep; ++j) v.col(j) *= flips[static_cast<std::size_t>(j)];
  return {std::move(u), solver.singularValues().head(keep), v.transpose()};
}

Matrix pinv(const Matrix& a) {
  const SvdResult d = svd(a);
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  if (d.s.size() == 0 || d.s(0) == 0.0) return out;
  const double cutoff = pinv_cutoff(a, d.s(0));
  for (Index j = 0; j < d.s.size(); ++j) {
    if (d.s(j) <= cutoff) break;
    out.noalias() += (d.vt.row(j).transpose() / d.s(j)) * d.u.col(j).transpose();
  }
  return out;
}

Index numerical_rank(const Matrix& a) {
  const SvdResult d = svd(a);
  if (d.s.size() == 0 || d.s(0) == 0.0) return 0;
  const double cutoff = pinv_cutoff(a, d.s(0));
  Index rank = 0;
  while (rank < d.s.size() && d.s(rank) > cutoff) ++rank;
  return rank;
}

EigResult eig_symmetric(const Matrix& a) {
  return eig_symmetric_lowest(a, a.rows());
}

EigResult eig_symmetric_lowest(const Matrix& a, Index count) {
  Matrix work = symmetric_part(a, "eig_symmetric");
  const Index n = work.rows();
  if (count < 0 || count > n) {
    throw ContractViolation("eig_symmetric: requested " + std::to_string(count) +
                            " eigenpairs of a " + std::to_string(n) + "x" + std::to_string(n) +
                            " matrix");
  }
  if (count == 0) return {Vector(0), Matrix(n, 0)};

  const auto ln = static_cast<lapack_int>(n);
  lapack_int found = 0;
  Vector values(n);
  Matrix vectors(n, count);
  std::vector<lapack_int> support(static_cast<std::size_t>(2 * n));
  // dsyevr overwrites the lower triangle; work is column-major like Eigen.
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', count == n ? 'A' : 'I', 'L', ln, work.data(), ln,
      0.0, 0.0, 1, static_cast<lapack_int>(count), 0.0, &found, values.data(), vectors.data(), ln,
      support.data());
  if (info != 0 || found != static_cast<lapack_int>(count)) {
    throw NumericFailure("eig_symmetric: LAPACK dsyevr failed with info=" + std::to_string(info));
  }
  return order_and_fix(values.head(count), std::move(vectors));
}

Matrix Standardizer::apply(const Matrix& a) const {
  if (a.cols() != means.size()) {
    throw ContractViolation("standardize: matrix has " + std::to_string(a.cols()) +
                            " columns, transform was fitted on " + std::to_string(means.size()));
  }
  return (a.rowwise() - means).array().rowwise() / scales.array();
}

Standardized standardize(const Matrix& a) {
  if (a.rows() < 1) throw ContractViolation("standardize: need at least one row");
  require_finite(a, "standardize");
  const double n = static_cast<double>(a.rows());
  Standardizer t{a.colwise().mean(), RowVector(a.cols())};
  for (Index j = 0; j < a.cols(); ++j) {
    const double var = (a.col(j).array() - t.means(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    t.scales(j) = sd > 0.0 ? sd : 1.0;
  }
  Matrix values = t.apply(a);
  return {std::move(values), std::move(t)};
}

}  // namespace dcc
