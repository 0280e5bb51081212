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
#include <utility>
#include <vector>

#include "dcc/numerics.hpp"
#include "dcc/random.hpp"

namespace dcc {

enum class Space { kRaw, kCollaborative, kSpectralEmbedding };

struct ClusterModel {
  Matrix centroids;         // k x dim
  std::vector<int> labels;  // one per input row, 0..k-1
  Space space = Space::kRaw;
  double inertia = 0.0;  // sum of squared distances to assigned centroids
  int iterations = 0;    // Lloyd updates performed
  std::vector<double> inertia_trace;  // inertia after every assignment step
};

inline constexpr int kDefaultMaxIter = 300;
inline constexpr int kDefaultNeighbors = 10;

// Index of the nearest centroid for every row of x; ties go to the lowest
// centroid index.
std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids);

double inertia(const Matrix& x, const Matrix& centroids, const std::vector<int>& labels);

// D^2 seeding: the first center is a uniformly drawn row, each further one is
// drawn with probability proportional to its squared distance to the
// nearest chosen center. Returns row indices.
std::vector<Index> kmeanspp_seeds(const Matrix& x, int k, Rng& rng);

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iter updates have run. Empty clusters are refilled with
// the point farthest from its centroid. With n_init > 1 the whole procedure
// is restarted from restart_seed(seed, r) and the lowest-inertia run kept
// (earliest on ties); run 0 uses seed itself.
ClusterModel kmeans(const Matrix& x, int k, int max_iter, std::uint64_t seed, int n_init = 1);

std::uint64_t restart_seed(std::uint64_t seed, int restart);

// Binary kNN graph (Euclidean, self excluded, ties to the lower index),
// symmetrized with max(W, W^T).
Matrix build_affinity(const Matrix& x, int neighbors);

// D^{-1/2} (D - W) D^{-1/2}, with D^{-1/2} = 0 on isolated nodes.
Matrix normalized_laplacian(const Matrix& w);

struct SpectralEmbedding {
  Matrix e;           // n x k, eigenvectors of L_sym in ascending order
  Vector eigenvalues; // the k smallest
  int neighbors = 0;
};

SpectralEmbedding spectral_embedding(const Matrix& x, int k, int neighbors);

struct SpectralResult {
  ClusterModel model;
  SpectralEmbedding embedding;
};

// Affinity -> embedding -> k-means on the embedding. With normalize_rows the
// embedding rows are scaled to unit length before k-means.
SpectralResult spectral_cluster(const Matrix& x, int k, int neighbors, int max_iter,
                                std::uint64_t seed, bool normalize_rows = false,
                                int n_init = 1);

}  // namespace dcc
