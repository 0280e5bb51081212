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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcc/collaboration.hpp"
#include "dcc/data.hpp"
#include "dcc/federation.hpp"

namespace dcc {

enum class DatasetSource { kBlobs, kCircles, kCsv };
enum class LocalScope { kNone, kFirst, kAll };

// One experiment, read from a flat `key = value` file. See README for keys.
struct ExperimentSpec {
  std::string name = "experiment";

  DatasetSource source = DatasetSource::kBlobs;
  std::string dataset = "blobs";  // generator or open-dataset name
  std::filesystem::path csv_path;  // explicit file for kCsv
  std::vector<std::filesystem::path> data_dirs;  // searched first for named datasets
  std::string label_column = "class";
  int generator_clusters = 3;
  int per_cluster = 500;
  double circle_noise = kDefaultCircleNoise;
  double blob_separation = kBlobMinSeparation;

  int c = 1;
  int d = 1;
  PartitionOptions partition;

  Algorithm algorithm = Algorithm::kKMeans;
  GMode mode = GMode::kAffine;
  IntermediateKind intermediate = IntermediateKind::kStandardizePca;
  std::optional<int> k;  // ground-truth cluster count when unset
  int neighbors = kDefaultNeighbors;
  int max_iter = kDefaultMaxIter;
  int n_init = 10;
  bool normalize_rows = false;
  std::optional<Index> m_hat;
  std::optional<Index> anchor_rows;  // n when unset

  int trials = 1;
  std::uint64_t master_seed = 0;
  LocalScope local = LocalScope::kFirst;
  bool centralized = true;

  std::filesystem::path output_dir = "results";
  std::string output_format = "csv";

  void validate() const;
};

// Parses the file; relative dataset paths resolve against its directory.
ExperimentSpec load_experiment(const std::filesystem::path& path);
ExperimentSpec parse_experiment(const std::string& text,
                                const std::filesystem::path& base_dir = ".");

struct MetricTriple {
  double ari = 0.0;
  double nmi = 0.0;
  double acc = 0.0;

  bool operator==(const MetricTriple&) const = default;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::map<std::string, MetricTriple> scores;  // by method name
  Index m_hat = 0;
  double alignment_residual = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // divisor n - 1; 0 for a single trial
};

struct TrialReport {
  std::string name;
  std::string dataset;
  Algorithm algorithm = Algorithm::kKMeans;
  int neighbors = 0;
  int trials_requested = 0;
  std::vector<std::string> methods;  // display order
  std::vector<TrialRecord> trials;   // completed trials, by index
  std::vector<std::pair<int, std::string>> aborted;

  bool operator==(const TrialReport&) const = default;

  // metric is "ARI", "NMI" or "ACC".
  std::vector<double> values(const std::string& method, const std::string& metric) const;
  Aggregate aggregate(const std::string& method, const std::string& metric) const;
};

inline const std::vector<std::string> kMetricNames = {"ARI", "NMI", "ACC"};
inline constexpr const char* kProposed = "proposed";
inline constexpr const char* kCentralized = "centralized";

std::string local_method_name(PartyId p);

// The trial's dataset (regenerated per trial for synthetic sources).
LabeledDataset trial_dataset(const ExperimentSpec& spec, std::uint64_t trial_seed);

// Cluster count known without reading data: k, the generator's count, or
// the registry entry of a named dataset. Throws ConfigError otherwise.
int expected_clusters(const ExperimentSpec& spec);

std::uint64_t trial_seed(const ExperimentSpec& spec, int trial);

// Session parameters of one trial; identical for every party.
SessionConfig session_config(const ExperimentSpec& spec, int k, std::uint64_t trial_seed);

// Everything a trial needs. The anchor is the out-of-band input every party
// can rebuild from the config (seed and feature bounds).
struct TrialSetup {
  std::uint64_t seed = 0;
  LabeledDataset data;
  int k = 0;
  LatticePartition partition;
  AnchorDataset anchor;
  SessionConfig session;
};

TrialSetup prepare_trial(const ExperimentSpec& spec, int trial,
                         const LabeledDataset* fixed = nullptr);

TrialReport run_experiment(const ExperimentSpec& spec);

}  // namespace dcc
