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

#include "dcc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dcc/errors.hpp"
#include "dcc/random.hpp"

namespace dcc {

namespace {

// Splits `items` into `parts` consecutive chunks whose sizes differ by at
// most one, larger chunks first.
std::vector<std::vector<Index>> split_even(const std::vector<Index>& items, int parts) {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(parts));
  const std::size_t n = items.size();
  const std::size_t base = n / static_cast<std::size_t>(parts);
  const std::size_t extra = n % static_cast<std::size_t>(parts);
  std::size_t pos = 0;
  for (std::size_t p = 0; p < out.size(); ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out[p].assign(items.begin() + static_cast<std::ptrdiff_t>(pos),
                  items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

std::vector<Index> iota_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

void sort_sets(std::vector<std::vector<Index>>& sets) {
  for (auto& s : sets) std::sort(s.begin(), s.end());
}

std::vector<std::vector<Index>> assign_rows(const LabeledDataset& ds, int c,
                                            const PartitionOptions& opt, std::uint64_t seed) {
  const Index n = ds.rows();
  switch (opt.rows) {
    case Assignment::kContiguous:
      return split_even(iota_indices(n), c);
    case Assignment::kIidRandom: {
      auto order = iota_indices(n);
      Rng rng(derive_seed(seed, "rows"));
      std::shuffle(order.begin(), order.end(), rng);
      auto sets = split_even(order, c);
      sort_sets(sets);
      return sets;
    }
    case Assignment::kByClusterMap: {
      std::vector<std::vector<Index>> sets(static_cast<std::size_t>(c));
      const int k = ds.cluster_count();
      Rng rng(derive_seed(seed, "rows"));
      for (int cluster = 0; cluster < k; ++cluster) {
        const auto it = opt.cluster_to_rows.find(cluster);
        if (it == opt.cluster_to_rows.end() || it->second.empty()) {
          throw ConfigError("partition: cluster map has no row block for cluster " +
                            std::to_string(cluster));
        }
        for (int block : it->second) {
          if (block < 0 || block >= c) {
            throw ConfigError("partition: cluster " + std::to_string(cluster) +
                              " mapped to row block " + std::to_string(block) + " outside 0.." +
                              std::to_string(c - 1));
          }
        }
        std::vector<Index> members;
        for (Index r = 0; r < n; ++r) {
          if (ds.labels[static_cast<std::size_t>(r)] == cluster) members.push_back(r);
        }
        std::shuffle(members.begin(), members.end(), rng);
        const auto pieces = split_even(members, static_cast<int>(it->second.size()));
        for (std::size_t p = 0; p < pieces.size(); ++p) {
          auto& dst = sets[static_cast<std::size_t>(it->second[p])];
          dst.insert(dst.end(), pieces[p].begin(), pieces[p].end());
        }
      }
      sort_sets(sets);
      for (int i = 0; i < c; ++i) {
        if (sets[static_cast<std::size_t>(i)].empty()) {
          throw ConfigError("partition: row block " + std::to_string(i) +
                            " receives no points under the cluster map");
        }
      }
      return sets;
    }
  }
  throw ConfigError("partition: unknown row assignment");
}

std::vector<std::vector<Index>> assign_columns(Index m, int d, const PartitionOptions& opt,
                                               std::uint64_t seed) {
  if (!opt.explicit_columns.empty()) {
    if (static_cast<int>(opt.explicit_columns.size()) != d) {
      throw ConfigError("partition: " + std::to_string(opt.explicit_columns.size()) +
                        " explicit column sets given for d=" + std::to_string(d));
    }
    std::vector<int> seen(static_cast<std::size_t>(m), 0);
    for (const auto& set : opt.explicit_columns) {
      if (set.empty()) throw ConfigError("partition: empty explicit column set");
      for (Index col : set) {
        if (col < 0 || col >= m) {
          throw ConfigError("partition: column " + std::to_string(col) + " out of range");
        }
        ++seen[static_cast<std::size_t>(col)];
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
      throw ConfigError("partition: explicit column sets must cover every feature exactly once");
    }
    auto sets = opt.explicit_columns;
    sort_sets(sets);
    return sets;
  }
  switch (opt.columns) {
    case Assignment::kContiguous:
      return split_even(iota_indices(m), d);
    case Assignment::kIidRandom: {
      auto order = iota_indices(m);
      Rng rng(derive_seed(seed, "columns"));
      std::shuffle(order.begin(), order.end(), rng);
      auto sets = split_even(order, d);
      sort_sets(sets);
      return sets;
    }
    case Assignment::kByClusterMap:
      break;
  }
  throw ConfigError("partition: columns cannot be assigned by cluster map");
}

LabeledDataset with_minor_features(Matrix major, std::vector<int> labels, Rng& rng) {
  const Index n = major.rows();
  Matrix cov = Matrix::Constant(4, 4, 0.01);
  cov.diagonal().setConstant(0.1);
  const Matrix chol = cov.llt().matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, 4);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 4; ++j) z(i, j) = normal(rng);
  }
  LabeledDataset ds;
  ds.features.resize(n, 6);
  ds.features.leftCols(2) = major;
  ds.features.rightCols(4) = z * chol.transpose();
  ds.labels = std::move(labels);
  ds.feature_names = {"major_1", "major_2", "minor_1", "minor_2", "minor_3", "minor_4"};
  return ds;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

int LabeledDataset::cluster_count() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void LabeledDataset::validate() const {
  if (static_cast<Index>(labels.size()) != features.rows()) {
    throw ContractViolation("dataset: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(features.rows()) + " rows");
  }
  require_finite(features, "dataset");
  std::set<int> seen(labels.begin(), labels.end());
  if (!seen.empty() && (*seen.begin() != 0 || *seen.rbegin() != static_cast<int>(seen.size()) - 1)) {
    throw ContractViolation("dataset: labels are not a contiguous 0-based range");
  }
}

Matrix LatticePartition::block(const Matrix& x, int i, int j) const {
  const auto& rows = row_sets.at(static_cast<std::size_t>(i));
  const auto& cols = col_sets.at(static_cast<std::size_t>(j));
  return x(rows, cols);
}

Matrix LatticePartition::column_block(const Matrix& x, int j) const {
  return x(Eigen::all, col_sets.at(static_cast<std::size_t>(j)));
}

std::vector<Index> LatticePartition::stacked_rows() const {
  std::vector<Index> out;
  for (const auto& s : row_sets) out.insert(out.end(), s.begin(), s.end());
  return out;
}

LatticePartition partition_lattice(const LabeledDataset& ds, int c, int d, Assignment assignment,
                                   std::uint64_t seed) {
  PartitionOptions opt;
  opt.rows = assignment;
  opt.columns = assignment == Assignment::kByClusterMap ? Assignment::kContiguous : assignment;
  return partition_lattice(ds, c, d, opt, seed);
}

LatticePartition partition_lattice(const LabeledDataset& ds, int c, int d,
                                   const PartitionOptions& options, std::uint64_t seed) {
  if (c < 1 || d < 1) throw ContractViolation("partition: c and d must be at least 1");
  if (c > ds.rows()) {
    throw ContractViolation("partition: c=" + std::to_string(c) + " exceeds n=" +
                            std::to_string(ds.rows()));
  }
  if (d > ds.cols()) {
    throw ContractViolation("partition: d=" + std::to_string(d) + " exceeds m=" +
                            std::to_string(ds.cols()));
  }
  LatticePartition p;
  p.c = c;
  p.d = d;
  p.row_sets = assign_rows(ds, c, options, seed);
  p.col_sets = assign_columns(ds.cols(), d, options, seed);
  return p;
}

Matrix reassemble(const LatticePartition& p, const std::vector<std::vector<Matrix>>& blocks,
                  Index rows, Index cols) {
  Matrix out(rows, cols);
  for (int i = 0; i < p.c; ++i) {
    for (int j = 0; j < p.d; ++j) {
      out(p.row_sets[static_cast<std::size_t>(i)], p.col_sets[static_cast<std::size_t>(j)]) =
          blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

LabeledDataset make_blobs(int k, int per_cluster, std::uint64_t seed, double min_separation) {
  if (k < 1 || per_cluster < 1) throw ContractViolation("make_blobs: k and per_cluster must be >= 1");
  if (!(min_separation >= 0.0) || min_separation > 10.0) {
    throw ContractViolation("make_blobs: min_separation must lie in [0, 10]");
  }
  Rng rng(seed);
  std::vector<Eigen::Vector2d> centers;
  while (static_cast<int>(centers.size()) < k) {
    const Eigen::Vector2d cand(-10.0 + 20.0 * uniform01(rng), -10.0 + 20.0 * uniform01(rng));
    const bool far = std::all_of(centers.begin(), centers.end(),
                                 [&](const Eigen::Vector2d& c) { return (c - cand).norm() >= min_separation; });
    if (far) centers.push_back(cand);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = static_cast<Index>(k) * per_cluster;
  Matrix major(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int b = 0; b < k; ++b) {
    for (int t = 0; t < per_cluster; ++t) {
      const Index row = static_cast<Index>(b) * per_cluster + t;
      major(row, 0) = centers[static_cast<std::size_t>(b)].x() + normal(rng);
      major(row, 1) = centers[static_cast<std::size_t>(b)].y() + normal(rng);
      labels[static_cast<std::size_t>(row)] = b;
    }
  }
  return with_minor_features(std::move(major), std::move(labels), rng);
}

LabeledDataset make_circles(int rings, int per_cluster, double noise_std, std::uint64_t seed) {
  if (rings < 2) throw ContractViolation("make_circles: need at least two rings");
  if (per_cluster < 1) throw ContractViolation("make_circles: per_cluster must be >= 1");
  if (!(noise_std >= 0.0)) throw ContractViolation("make_circles: noise_std must be >= 0");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = static_cast<Index>(rings) * per_cluster;
  Matrix major(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  double radius = 1.0;
  for (int ring = 0; ring < rings; ++ring) {
    for (int t = 0; t < per_cluster; ++t) {
      const double angle = 2.0 * std::numbers::pi * t / per_cluster;
      const Index row = static_cast<Index>(ring) * per_cluster + t;
      major(row, 0) = radius * std::cos(angle);
      major(row, 1) = radius * std::sin(angle);
      if (noise_std > 0.0) {
        major(row, 0) += noise_std * normal(rng);
        major(row, 1) += noise_std * normal(rng);
      }
      labels[static_cast<std::size_t>(row)] = ring;
    }
    radius *= kCircleRadiusDecay;
  }
  return with_minor_features(std::move(major), std::move(labels), rng);
}

LabeledDataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("load_csv: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      lines.push_back(rest.substr(0, nl));
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw IngestionError("load_csv: " + path.string() + " is empty");

  std::string_view header = lines.front();
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  const auto names = split_commas(header);
  std::ptrdiff_t label_at = -1;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == label_column) label_at = static_cast<std::ptrdiff_t>(i);
  }
  if (label_at < 0) {
    throw ConfigError("load_csv: label column '" + label_column + "' not in header of " +
                      path.string());
  }

  LabeledDataset ds;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) != label_at) ds.feature_names.emplace_back(names[i]);
  }
  const Index n = static_cast<Index>(lines.size()) - 1;
  const Index m = static_cast<Index>(ds.feature_names.size());
  ds.features.resize(n, m);
  ds.labels.reserve(static_cast<std::size_t>(n));
  std::unordered_map<std::string, int> codes;
  for (Index r = 0; r < n; ++r) {
    const auto cells = split_commas(lines[static_cast<std::size_t>(r + 1)]);
    if (cells.size() != names.size()) {
      throw IngestionError("load_csv: line " + std::to_string(r + 2) + " has " +
                           std::to_string(cells.size()) + " fields, header has " +
                           std::to_string(names.size()));
    }
    Index col = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == label_at) {
        const auto [it, fresh] =
            codes.try_emplace(std::string(cells[i]), static_cast<int>(codes.size()));
        ds.labels.push_back(it->second);
        continue;
      }
      double value = 0.0;
      const auto cell = cells[i];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw IngestionError("load_csv: line " + std::to_string(r + 2) + ", column " +
                             std::to_string(i + 1) + " ('" + std::string(names[i]) +
                             "'): cannot parse '" + std::string(cell) + "' as a number");
      }
      ds.features(r, col++) = value;
    }
  }
  return ds;
}

FeatureBounds feature_bounds(const Matrix& x) {
  if (x.rows() < 1) throw ContractViolation("feature_bounds: empty matrix");
  FeatureBounds b;
  for (Index j = 0; j < x.cols(); ++j) b.emplace_back(x.col(j).minCoeff(), x.col(j).maxCoeff());
  return b;
}

AnchorDataset generate_anchor(const FeatureBounds& bounds, Index r, std::uint64_t seed) {
  if (r < 1) throw ContractViolation("generate_anchor: r must be >= 1");
  for (const auto& [lo, hi] : bounds) {
    if (!(lo <= hi)) throw ContractViolation("generate_anchor: bound min exceeds max");
  }
  Rng rng(seed);
  AnchorDataset a{Matrix(r, static_cast<Index>(bounds.size()))};
  for (Index i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      const auto [lo, hi] = bounds[j];
      a.features(i, static_cast<Index>(j)) = std::min(hi, lo + (hi - lo) * uniform01(rng));
    }
  }
  return a;
}

}  // namespace dcc
