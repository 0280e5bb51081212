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

#include "dcc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

double squared_distance(const Matrix& a, Index i, const Matrix& b, Index j) {
  double acc = 0.0;
  for (Index f = 0; f < a.cols(); ++f) {
    const double diff = a(i, f) - b(j, f);
    acc += diff * diff;
  }
  return acc;
}

std::vector<Index> cluster_sizes(const std::vector<int>& labels, int k) {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

Matrix cluster_means(const Matrix& x, const std::vector<int>& labels, int k) {
  Matrix sums = Matrix::Zero(k, x.cols());
  const auto sizes = cluster_sizes(labels, k);
  for (Index i = 0; i < x.rows(); ++i) sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) {
      sums.row(j) /= static_cast<double>(sizes[static_cast<std::size_t>(j)]);
    }
  }
  return sums;
}

// Gives every empty cluster a singleton: the point farthest from its own
// centroid among clusters that can spare one. Updates labels and centroids.
void repair_empty(const Matrix& x, std::vector<int>& labels, Matrix& centroids, int k) {
  auto sizes = cluster_sizes(labels, k);
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) continue;
    Index far = -1;
    double best = -1.0;
    for (Index i = 0; i < x.rows(); ++i) {
      const int owner = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(owner)] < 2) continue;
      const double dist = squared_distance(x, i, centroids, owner);
      if (dist > best) {
        best = dist;
        far = i;
      }
    }
    if (far < 0) break;  // fewer points than clusters; nothing to move
    const int donor = labels[static_cast<std::size_t>(far)];
    labels[static_cast<std::size_t>(far)] = j;
    --sizes[static_cast<std::size_t>(donor)];
    ++sizes[static_cast<std::size_t>(j)];
    centroids.row(j) = x.row(far);
    centroids.row(donor).setZero();
    for (Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == donor) centroids.row(donor) += x.row(i);
    }
    centroids.row(donor) /= static_cast<double>(sizes[static_cast<std::size_t>(donor)]);
  }
}

}  // namespace

std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids) {
  if (centroids.rows() < 1) throw ContractViolation("assign_nearest: no centroids");
  if (centroids.cols() != x.cols()) {
    throw ContractViolation("assign_nearest: centroid dimension " +
                            std::to_string(centroids.cols()) + " != data dimension " +
                            std::to_string(x.cols()));
  }
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) {
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < centroids.rows(); ++j) {
      const double dist = squared_distance(x, i, centroids, j);
      if (dist < best) {
        best = dist;
        arg = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return labels;
}

double inertia(const Matrix& x, const Matrix& centroids, const std::vector<int>& labels) {
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    total += squared_distance(x, i, centroids, labels[static_cast<std::size_t>(i)]);
  }
  return total;
}

std::vector<Index> kmeanspp_seeds(const Matrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  if (k < 1 || k > n) {
    throw ContractViolation("kmeans: k=" + std::to_string(k) + " must be in 1..n=" +
                            std::to_string(n));
  }
  std::vector<Index> chosen;
  chosen.push_back(std::min<Index>(n - 1, static_cast<Index>(uniform01(rng) * n)));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < k) {
    const Index last = chosen.back();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& di = d2[static_cast<std::size_t>(i)];
      di = std::min(di, squared_distance(x, i, x, last));
      total += di;
    }
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double running = 0.0;
      for (Index i = 0; i < n; ++i) {
        running += d2[static_cast<std::size_t>(i)];
        if (running > target) {
          pick = i;
          break;
        }
      }
    } else {
      // Every point coincides with a chosen center.
      pick = std::min<Index>(n - 1, static_cast<Index>(uniform01(rng) * n));
    }
    chosen.push_back(pick);
  }
  return chosen;
}

namespace {

ClusterModel kmeans_once(const Matrix& x, int k, int max_iter, std::uint64_t seed) {
  Rng rng(seed);
  const auto seeds = kmeanspp_seeds(x, k, rng);

  ClusterModel model;
  model.centroids = x(seeds, Eigen::all);
  model.labels = assign_nearest(x, model.centroids);
  repair_empty(x, model.labels, model.centroids, k);
  model.inertia_trace.push_back(inertia(x, model.centroids, model.labels));

  for (int it = 0; it < max_iter; ++it) {
    Matrix centroids = cluster_means(x, model.labels, k);
    std::vector<int> labels = assign_nearest(x, centroids);
    repair_empty(x, labels, centroids, k);
    ++model.iterations;
    const bool stable = labels == model.labels;
    model.centroids = std::move(centroids);
    model.labels = std::move(labels);
    model.inertia_trace.push_back(inertia(x, model.centroids, model.labels));
    if (stable) break;
  }
  model.inertia = model.inertia_trace.back();
  return model;
}

}  // namespace

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return restart == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(restart));
}

ClusterModel kmeans(const Matrix& x, int k, int max_iter, std::uint64_t seed, int n_init) {
  if (max_iter < 1) throw ContractViolation("kmeans: max_iter must be >= 1");
  if (n_init < 1) throw ContractViolation("kmeans: n_init must be >= 1");
  require_finite(x, "kmeans");
  ClusterModel best = kmeans_once(x, k, max_iter, seed);
  for (int r = 1; r < n_init; ++r) {
    ClusterModel run = kmeans_once(x, k, max_iter, restart_seed(seed, r));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

Matrix build_affinity(const Matrix& x, int neighbors) {
  const Index n = x.rows();
  if (neighbors < 1 || neighbors >= n) {
    throw ContractViolation("build_affinity: neighbors=" + std::to_string(neighbors) +
                            " must be in 1..n-1=" + std::to_string(n - 1));
  }
  require_finite(x, "build_affinity");
  Matrix w = Matrix::Zero(n, n);
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t slot = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) dist[slot++] = {squared_distance(x, i, x, j), j};
    }
    std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
    for (int t = 0; t < neighbors; ++t) {
      const Index j = dist[static_cast<std::size_t>(t)].second;
      w(i, j) = 1.0;
      w(j, i) = 1.0;
    }
  }
  return w;
}

Matrix normalized_laplacian(const Matrix& w) {
  if (w.rows() != w.cols()) throw ContractViolation("normalized_laplacian: W must be square");
  const Vector degree = w.rowwise().sum();
  Vector inv_sqrt(degree.size());
  for (Index i = 0; i < degree.size(); ++i) {
    inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  }
  Matrix lap = -w;
  lap.diagonal() += degree;
  return inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();
}

SpectralEmbedding spectral_embedding(const Matrix& x, int k, int neighbors) {
  if (k < 1 || k > x.rows()) {
    throw ContractViolation("spectral_embedding: k=" + std::to_string(k) + " must be in 1..n=" +
                            std::to_string(x.rows()));
  }
  const Matrix lap = normalized_laplacian(build_affinity(x, neighbors));
  EigResult eig = eig_symmetric_lowest(lap, k);
  return {std::move(eig.vectors), std::move(eig.values), neighbors};
}

SpectralResult spectral_cluster(const Matrix& x, int k, int neighbors, int max_iter,
                                std::uint64_t seed, bool normalize_rows, int n_init) {
  SpectralEmbedding emb = spectral_embedding(x, k, neighbors);
  Matrix points = emb.e;
  if (normalize_rows) {
    for (Index i = 0; i < points.rows(); ++i) {
      const double norm = points.row(i).norm();
      if (norm > 0.0) points.row(i) /= norm;
    }
  }
  ClusterModel model = kmeans(points, k, max_iter, seed, n_init);
  model.space = Space::kSpectralEmbedding;
  return {std::move(model), std::move(emb)};
}

}  // namespace dcc
