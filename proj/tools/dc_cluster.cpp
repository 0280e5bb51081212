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

// dc-cluster: experiment runner and party processes for federated clustering
// over lattice-partitioned data.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dcc/datasets.hpp"
#include "dcc/errors.hpp"
#include "dcc/experiment.hpp"
#include "dcc/federation.hpp"
#include "dcc/report.hpp"
#include "dcc/transport.hpp"

namespace fs = std::filesystem;
using namespace dcc;

namespace {

struct Overrides {
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

ExperimentSpec load_with(const fs::path& path, const Overrides& o) {
  ExperimentSpec spec = load_experiment(path);
  if (o.trials) spec.trials = *o.trials;
  if (o.seed) spec.master_seed = *o.seed;
  if (o.out) spec.output_dir = *o.out;
  if (o.format) spec.output_format = *o.format;
  spec.validate();
  return spec;
}

std::vector<fs::path> expand_configs(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const std::string& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.is_regular_file() && entry.path().extension() == ".conf") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  if (out.empty()) throw ConfigError("no config files given");
  return out;
}

int cmd_run(const std::vector<std::string>& configs, const Overrides& o) {
  std::vector<TrialReport> reports;
  ExperimentSpec last;
  for (const fs::path& path : expand_configs(configs)) {
    const ExperimentSpec spec = load_with(path, o);
    const auto start = std::chrono::steady_clock::now();
    reports.push_back(run_experiment(spec));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const TrialReport& r = reports.back();
    std::fprintf(stderr, "%s: %zu/%d trials in %.2f s", spec.name.c_str(), r.trials.size(),
                 spec.trials, secs);
    if (spec.algorithm == Algorithm::kSpectral) std::fprintf(stderr, " (neighbors=%d)", spec.neighbors);
    std::fputc('\n', stderr);
    for (const auto& [trial, why] : r.aborted) {
      std::fprintf(stderr, "  trial %d aborted: %s\n", trial, why.c_str());
    }
    last = spec;
  }
  std::cout << markdown_table(reports);
  const std::string stem = reports.size() == 1 ? reports.front().name : "suite";
  for (const fs::path& p : emit_report(reports, parse_report_format(last.output_format),
                                       last.output_dir, stem)) {
    std::fprintf(stderr, "wrote %s\n", p.string().c_str());
  }
  return 0;
}

PartyId parse_party(const std::string& text, const ExperimentSpec& spec) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--party expects i,j");
  int i = 0;
  int j = 0;
  try {
    i = std::stoi(text.substr(0, comma));
    j = std::stoi(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw ConfigError("--party expects two integers, got '" + text + "'");
  }
  if (i < 1 || j < 1 || i > spec.c || j > spec.d) {
    throw ConfigError("--party " + text + " is outside the " + std::to_string(spec.c) + "x" +
                      std::to_string(spec.d) + " lattice (1-based)");
  }
  return PartyId{i - 1, j - 1};
}

int cmd_analyst(const std::string& listen, const std::string& config, const Overrides& o) {
  const ExperimentSpec spec = load_with(config, o);
  const auto [host, port] = parse_host_port(listen);
  const SessionConfig cfg =
      session_config(spec, expected_clusters(spec), trial_seed(spec, 0));
  TcpAnalystEndpoint endpoint(host, port);
  std::fprintf(stderr, "analyst listening on %s:%u for %d shares\n", host.c_str(),
               static_cast<unsigned>(endpoint.port()), cfg.c * cfg.d);
  const AnalystSessionReport report = analyst_party_run(cfg, endpoint);
  std::printf("shares received: %zu\nresults sent: %zu\nm_hat: %ld\nalignment residual: %.3e\n",
              report.counts.received, report.counts.sent, static_cast<long>(report.m_hat),
              report.alignment_residual);
  for (const std::string& w : report.warnings) std::printf("warning: %s\n", w.c_str());
  return 0;
}

int cmd_user(const std::string& connect, const std::string& party_text, const std::string& config,
             const Overrides& o) {
  const ExperimentSpec spec = load_with(config, o);
  const PartyId party = parse_party(party_text, spec);
  const auto [host, port] = parse_host_port(connect);
  // Each party rebuilds the same trial locally; only its own block is used.
  const TrialSetup setup = prepare_trial(spec, 0);
  const Matrix block = setup.partition.block(setup.data.features, party.row, party.col);
  const Matrix anchor_block = setup.partition.column_block(setup.anchor.features, party.col);
  auto channel = tcp_connect(host, port, setup.session.timeout);
  const UserSessionReport report =
      user_party_run(party, block, anchor_block, setup.session, *channel);

  fs::create_directories(spec.output_dir);
  const fs::path out = spec.output_dir / ("labels_" + std::to_string(party.row + 1) + "_" +
                                          std::to_string(party.col + 1) + ".csv");
  std::ofstream file(out);
  file << "row,label\n";
  const auto& rows = setup.partition.row_sets[static_cast<std::size_t>(party.row)];
  for (std::size_t t = 0; t < rows.size(); ++t) file << rows[t] << ',' << report.labels[t] << '\n';
  if (!file) throw ConfigError("cannot write " + out.string());
  std::printf("party %s: %zu labels, sent %zu, received %zu -> %s\n", party.to_string().c_str(),
              report.labels.size(), report.counts.sent, report.counts.received,
              out.string().c_str());
  return 0;
}

int cmd_fetch(const std::vector<std::string>& names, const std::string& cache,
              const std::optional<std::string>& from) {
  if (from && names.size() != 1) throw ConfigError("--from works with a single dataset");
  std::vector<std::string> todo = names;
  if (todo.size() == 1 && todo.front() == "all") {
    todo.clear();
    for (const DatasetInfo& d : known_datasets()) todo.push_back(d.name);
  }
  int failures = 0;
  for (const std::string& name : todo) {
    try {
      const FetchResult r = fetch_dataset(
          name, cache, from ? std::optional<fs::path>(*from) : std::nullopt);
      std::printf("%s: %s sha256=%s%s\n", name.c_str(), r.path.string().c_str(), r.sha256.c_str(),
                  r.verified ? " (verified)" : " (no pinned checksum)");
    } catch (const Error& e) {
      std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_list(const std::string& cache) {
  std::printf("%-10s %6s %4s %3s  %-8s %s\n", "name", "n", "m", "k", "status", "source");
  for (const DatasetInfo& d : known_datasets()) {
    std::string status = "missing";
    try {
      const fs::path p = locate_dataset(d.name, {cache});
      status = p.parent_path() == fs::path("data") ? "bundled" : "cached";
    } catch (const Error&) {
    }
    std::printf("%-10s %6d %4d %3d  %-8s %s\n", d.name.c_str(), d.rows, d.features, d.clusters,
                status.c_str(), d.url.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated clustering over horizontally and vertically partitioned data"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"csv", "json", "md"}));
  };

  std::vector<std::string> run_configs;
  auto* run = app.add_subcommand("run", "Run experiments from config files or directories");
  run->add_option("config", run_configs, "Config file(s) or directory")->required();
  add_common(run);

  std::string listen;
  std::string analyst_config;
  auto* analyst = app.add_subcommand("analyst", "Act as the analyst of a TCP session");
  analyst->add_option("--listen", listen, "host:port")->required();
  analyst->add_option("config", analyst_config, "Config file")->required();
  add_common(analyst);

  std::string connect;
  std::string party;
  std::string user_config;
  auto* user = app.add_subcommand("user", "Act as one user of a TCP session");
  user->add_option("--connect", connect, "Analyst host:port")->required();
  user->add_option("--party", party, "Lattice position i,j (1-based)")->required();
  user->add_option("config", user_config, "Config file")->required();
  add_common(user);

  auto* datasets = app.add_subcommand("datasets", "Manage open datasets");
  datasets->require_subcommand(1);
  std::string cache = default_cache_dir().string();
  std::vector<std::string> fetch_names;
  std::optional<std::string> from;
  auto* fetch = datasets->add_subcommand("fetch", "Download, convert and verify datasets");
  fetch->add_option("name", fetch_names, "Dataset name(s) or 'all'")->required();
  fetch->add_option("--cache", cache, "Cache directory");
  fetch->add_option("--from", from, "Use a local copy of the download instead")
      ->check(CLI::ExistingFile);
  auto* list = datasets->add_subcommand("list", "Show known datasets and where they are");
  list->add_option("--cache", cache, "Cache directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_configs, o);
    if (analyst->parsed()) return cmd_analyst(listen, analyst_config, o);
    if (user->parsed()) return cmd_user(connect, party, user_config, o);
    if (fetch->parsed()) return cmd_fetch(fetch_names, cache, from);
    if (list->parsed()) return cmd_list(cache);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
