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

#include "dcc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "dcc/clustering.hpp"
#include "dcc/datasets.hpp"
#include "dcc/errors.hpp"
#include "dcc/federation.hpp"
#include "dcc/metrics.hpp"
#include "dcc/random.hpp"

namespace dcc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

Assignment parse_assignment(const std::string& key, const std::string& value) {
  if (value == "iid") return Assignment::kIidRandom;
  if (value == "contiguous") return Assignment::kContiguous;
  if (value == "by-cluster") return Assignment::kByClusterMap;
  throw ConfigError("key '" + key + "': expected iid, contiguous or by-cluster, got '" + value +
                    "'");
}

// "1,3,4;2,5,6" with 1-based feature numbers.
std::vector<std::vector<Index>> parse_column_blocks(const std::string& key,
                                                    const std::string& value) {
  std::vector<std::vector<Index>> out;
  for (const std::string& block : split(value, ';')) {
    std::vector<Index> cols;
    for (const std::string& item : split(block, ',')) {
      const auto f = parse_number<long long>(key, item);
      if (f < 1) throw ConfigError("key '" + key + "': feature numbers start at 1");
      cols.push_back(static_cast<Index>(f - 1));
    }
    out.push_back(std::move(cols));
  }
  return out;
}

// "0:1;1:1,2;2:2": cluster id -> 1-based row blocks.
std::map<int, std::vector<int>> parse_cluster_rows(const std::string& key,
                                                   const std::string& value) {
  std::map<int, std::vector<int>> out;
  for (const std::string& entry : split(value, ';')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("key '" + key + "': entry '" + entry + "' lacks ':'");
    }
    const int cluster = parse_number<int>(key, trim(entry.substr(0, colon)));
    std::vector<int> rows;
    for (const std::string& item : split(trim(entry.substr(colon + 1)), ',')) {
      const int r = parse_number<int>(key, item);
      if (r < 1) throw ConfigError("key '" + key + "': row blocks start at 1");
      rows.push_back(r - 1);
    }
    if (!out.emplace(cluster, std::move(rows)).second) {
      throw ConfigError("key '" + key + "': cluster " + std::to_string(cluster) + " listed twice");
    }
  }
  return out;
}

std::vector<int> subset(const std::vector<int>& labels, const std::vector<Index>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

MetricTriple score(const std::vector<int>& truth, const std::vector<int>& predicted) {
  return MetricTriple{ari(truth, predicted), nmi(truth, predicted), acc(truth, predicted)};
}

std::vector<int> cluster_baseline(const ExperimentSpec& spec, const Matrix& x, int k,
                                  std::uint64_t seed) {
  if (spec.algorithm == Algorithm::kKMeans) {
    return kmeans(x, k, spec.max_iter, seed, spec.n_init).labels;
  }
  const int neighbors = static_cast<int>(
      std::min<Index>(spec.neighbors, std::max<Index>(1, x.rows() - 1)));
  return spectral_cluster(x, k, neighbors, spec.max_iter, seed, spec.normalize_rows, spec.n_init)
      .model.labels;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (c < 1 || d < 1) throw ConfigError("partition.c and partition.d must be >= 1");
  if (k && *k < 1) throw ConfigError("k must be >= 1");
  if (neighbors < 1) throw ConfigError("neighbors must be >= 1");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (m_hat && *m_hat < 1) throw ConfigError("m_hat must be >= 1");
  if (anchor_rows && *anchor_rows < 1) throw ConfigError("anchor.rows must be >= 1");
  if (source != DatasetSource::kCsv && (generator_clusters < 1 || per_cluster < 1)) {
    throw ConfigError("dataset.clusters and dataset.per_cluster must be >= 1");
  }
  if (source == DatasetSource::kCircles && generator_clusters < 2) {
    throw ConfigError("circles need dataset.clusters >= 2");
  }
  if (partition.rows == Assignment::kByClusterMap && partition.cluster_to_rows.empty()) {
    throw ConfigError("partition.rows = by-cluster needs partition.cluster_rows");
  }
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentSpec spec = parse_experiment(buf.str(), path.parent_path().empty()
                                                        ? std::filesystem::path(".")
                                                        : path.parent_path());
  if (spec.name == "experiment") spec.name = path.stem().string();
  return spec;
}

ExperimentSpec parse_experiment(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  spec.data_dirs = {base_dir, base_dir / ".." / "data"};
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"name", [&](auto&, auto& v) { spec.name = v; }},
      {"dataset",
       [&](auto&, auto& v) {
         spec.dataset = v;
         if (v == "blobs") {
           spec.source = DatasetSource::kBlobs;
         } else if (v == "circles") {
           spec.source = DatasetSource::kCircles;
         } else {
           spec.source = DatasetSource::kCsv;
         }
       }},
      {"dataset.path", [&](auto&, auto& v) { spec.csv_path = base_dir / v; }},
      {"dataset.label", [&](auto&, auto& v) { spec.label_column = v; }},
      {"dataset.clusters", [&](auto& k, auto& v) { spec.generator_clusters = parse_number<int>(k, v); }},
      {"dataset.per_cluster", [&](auto& k, auto& v) { spec.per_cluster = parse_number<int>(k, v); }},
      {"dataset.noise", [&](auto& k, auto& v) { spec.circle_noise = parse_number<double>(k, v); }},
      {"dataset.separation",
       [&](auto& k, auto& v) { spec.blob_separation = parse_number<double>(k, v); }},
      {"partition.c", [&](auto& k, auto& v) { spec.c = parse_number<int>(k, v); }},
      {"partition.d", [&](auto& k, auto& v) { spec.d = parse_number<int>(k, v); }},
      {"partition.rows", [&](auto& k, auto& v) { spec.partition.rows = parse_assignment(k, v); }},
      {"partition.columns",
       [&](auto& k, auto& v) {
         spec.partition.columns = parse_assignment(k, v);
         if (spec.partition.columns == Assignment::kByClusterMap) {
           throw ConfigError("key '" + k + "': columns cannot be assigned by cluster");
         }
       }},
      {"partition.column_blocks",
       [&](auto& k, auto& v) { spec.partition.explicit_columns = parse_column_blocks(k, v); }},
      {"partition.cluster_rows",
       [&](auto& k, auto& v) { spec.partition.cluster_to_rows = parse_cluster_rows(k, v); }},
      {"algorithm", [&](auto&, auto& v) { spec.algorithm = parse_algorithm(v); }},
      {"mode", [&](auto&, auto& v) { spec.mode = parse_mode(v); }},
      {"intermediate", [&](auto&, auto& v) { spec.intermediate = parse_intermediate(v); }},
      {"k",
       [&](auto& k, auto& v) {
         if (v == "auto") {
           spec.k.reset();
         } else {
           spec.k = parse_number<int>(k, v);
         }
       }},
      {"neighbors", [&](auto& k, auto& v) { spec.neighbors = parse_number<int>(k, v); }},
      {"max_iter", [&](auto& k, auto& v) { spec.max_iter = parse_number<int>(k, v); }},
      {"n_init", [&](auto& k, auto& v) { spec.n_init = parse_number<int>(k, v); }},
      {"normalize_rows", [&](auto& k, auto& v) { spec.normalize_rows = parse_bool(k, v); }},
      {"m_hat",
       [&](auto& k, auto& v) {
         if (v == "auto") {
           spec.m_hat.reset();
         } else {
           spec.m_hat = parse_number<Index>(k, v);
         }
       }},
      {"anchor.rows",
       [&](auto& k, auto& v) {
         if (v == "auto") {
           spec.anchor_rows.reset();
         } else {
           spec.anchor_rows = parse_number<Index>(k, v);
         }
       }},
      {"trials", [&](auto& k, auto& v) { spec.trials = parse_number<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { spec.master_seed = parse_number<std::uint64_t>(k, v); }},
      {"local",
       [&](auto& k, auto& v) {
         if (v == "none") {
           spec.local = LocalScope::kNone;
         } else if (v == "first") {
           spec.local = LocalScope::kFirst;
         } else if (v == "all") {
           spec.local = LocalScope::kAll;
         } else {
           throw ConfigError("key '" + k + "': expected none, first or all");
         }
       }},
      {"centralized", [&](auto& k, auto& v) { spec.centralized = parse_bool(k, v); }},
      {"output.dir", [&](auto&, auto& v) { spec.output_dir = v; }},
      {"output.format", [&](auto&, auto& v) { spec.output_format = v; }},
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                        "' set twice");
    }
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (spec.source == DatasetSource::kCsv && spec.dataset == "csv" && spec.csv_path.empty()) {
    throw ConfigError("dataset = csv needs dataset.path");
  }
  spec.validate();
  return spec;
}

std::vector<double> TrialReport::values(const std::string& method,
                                        const std::string& metric) const {
  std::vector<double> out;
  for (const TrialRecord& t : trials) {
    const auto it = t.scores.find(method);
    if (it == t.scores.end()) continue;
    if (metric == "ARI") {
      out.push_back(it->second.ari);
    } else if (metric == "NMI") {
      out.push_back(it->second.nmi);
    } else if (metric == "ACC") {
      out.push_back(it->second.acc);
    } else {
      throw ContractViolation("unknown metric " + metric);
    }
  }
  return out;
}

Aggregate TrialReport::aggregate(const std::string& method, const std::string& metric) const {
  const std::vector<double> v = values(method, metric);
  Aggregate a;
  if (v.empty()) return a;
  double sum = 0.0;
  for (double x : v) sum += x;
  a.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return a;
}

std::string local_method_name(PartyId p) { return "local" + p.to_string(); }

LabeledDataset trial_dataset(const ExperimentSpec& spec, std::uint64_t trial_seed) {
  const std::uint64_t seed = derive_seed(trial_seed, "data");
  switch (spec.source) {
    case DatasetSource::kBlobs:
      return make_blobs(spec.generator_clusters, spec.per_cluster, seed, spec.blob_separation);
    case DatasetSource::kCircles:
      return make_circles(spec.generator_clusters, spec.per_cluster, spec.circle_noise, seed);
    case DatasetSource::kCsv:
      break;
  }
  const std::filesystem::path path =
      spec.csv_path.empty() ? locate_dataset(spec.dataset, spec.data_dirs) : spec.csv_path;
  return load_csv(path, spec.label_column);
}

int expected_clusters(const ExperimentSpec& spec) {
  if (spec.k) return *spec.k;
  if (spec.source != DatasetSource::kCsv) return spec.generator_clusters;
  if (spec.csv_path.empty()) return dataset_info(spec.dataset).clusters;
  throw ConfigError("set k for dataset " + spec.csv_path.string());
}

std::uint64_t trial_seed(const ExperimentSpec& spec, int trial) {
  return derive_seed(spec.master_seed, static_cast<std::uint64_t>(trial));
}

SessionConfig session_config(const ExperimentSpec& spec, int k, std::uint64_t seed) {
  SessionConfig session;
  session.c = spec.c;
  session.d = spec.d;
  session.k = k;
  session.algorithm = spec.algorithm;
  session.mode = spec.mode;
  session.intermediate = spec.intermediate;
  session.neighbors = spec.neighbors;
  session.max_iter = spec.max_iter;
  session.n_init = spec.n_init;
  session.master_seed = derive_seed(seed, "dc");
  session.m_hat = spec.m_hat;
  session.normalize_rows = spec.normalize_rows;
  return session;
}

TrialSetup prepare_trial(const ExperimentSpec& spec, int trial, const LabeledDataset* fixed) {
  TrialSetup setup;
  setup.seed = trial_seed(spec, trial);
  setup.data = fixed != nullptr ? *fixed : trial_dataset(spec, setup.seed);
  setup.data.validate();
  setup.k = spec.k.value_or(setup.data.cluster_count());
  setup.partition = partition_lattice(setup.data, spec.c, spec.d, spec.partition,
                                      derive_seed(setup.seed, "partition"));
  setup.anchor = generate_anchor(feature_bounds(setup.data.features),
                                 spec.anchor_rows.value_or(setup.data.rows()),
                                 derive_seed(setup.seed, "anchor"));
  setup.session = session_config(spec, setup.k, setup.seed);
  return setup;
}

TrialReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  TrialReport report;
  report.name = spec.name;
  report.dataset = spec.dataset;
  report.algorithm = spec.algorithm;
  report.neighbors = spec.neighbors;
  report.trials_requested = spec.trials;

  std::vector<PartyId> local_parties;
  if (spec.local == LocalScope::kFirst) {
    local_parties.push_back(PartyId{0, 0});
  } else if (spec.local == LocalScope::kAll) {
    for (int i = 0; i < spec.c; ++i) {
      for (int j = 0; j < spec.d; ++j) local_parties.push_back(PartyId{i, j});
    }
  }
  for (PartyId p : local_parties) report.methods.push_back(local_method_name(p));
  report.methods.push_back(kProposed);
  if (spec.centralized) report.methods.push_back(kCentralized);

  // Open data is read once; generators run per trial.
  std::optional<LabeledDataset> fixed;
  if (spec.source == DatasetSource::kCsv) fixed = trial_dataset(spec, 0);

  for (int t = 0; t < spec.trials; ++t) {
    try {
      const TrialSetup setup = prepare_trial(spec, t, fixed ? &*fixed : nullptr);
      const LabeledDataset& ds = setup.data;
      TrialRecord record;
      record.trial = t;
      record.seed = setup.seed;

      for (PartyId p : local_parties) {
        const Matrix block = setup.partition.block(ds.features, p.row, p.col);
        const auto truth =
            subset(ds.labels, setup.partition.row_sets[static_cast<std::size_t>(p.row)]);
        const std::uint64_t seed = derive_seed(derive_seed(setup.seed, "local"),
                                               static_cast<std::uint64_t>(p.row * spec.d + p.col));
        const int k = std::min<int>(setup.k, static_cast<int>(block.rows()));
        record.scores[local_method_name(p)] = score(truth, cluster_baseline(spec, block, k, seed));
      }

      const SessionOutcome dc =
          run_in_process_session(ds.features, setup.partition, setup.anchor, setup.session);
      record.scores[kProposed] = score(ds.labels, dc.labels);
      record.m_hat = dc.analyst.m_hat;
      record.alignment_residual = dc.analyst.alignment_residual;

      if (spec.centralized) {
        record.scores[kCentralized] = score(
            ds.labels, cluster_baseline(spec, ds.features, setup.k,
                                        derive_seed(setup.seed, "centralized")));
      }
      report.trials.push_back(std::move(record));
    } catch (const IngestionError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      report.aborted.emplace_back(t, e.what());
    }
  }
  return report;
}

}  // namespace dcc
