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

#include "dcc/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

using nlohmann::json;

// Shortest text that reads back to the same double.
std::string exact(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// RFC 4180 quoting for free-text fields such as "local(1,2)".
std::string csv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

double metric_of(const MetricTriple& m, const std::string& metric) {
  if (metric == "ARI") return m.ari;
  if (metric == "NMI") return m.nmi;
  return m.acc;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("error writing " + path.string());
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  if (s == "md" || s == "markdown") return ReportFormat::kMarkdown;
  throw ConfigError("unknown format '" + s + "' (expected csv, json or md)");
}

std::string summary_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "experiment,dataset,algorithm,method,metric,mean,std,trials\n";
  for (const TrialReport& r : reports) {
    for (const std::string& method : r.methods) {
      for (const std::string& metric : kMetricNames) {
        const Aggregate a = r.aggregate(method, metric);
        out << csv(r.name) << ',' << csv(r.dataset) << ',' << to_string(r.algorithm) << ','
            << csv(method) << ','
            << metric << ',' << exact(a.mean) << ',' << exact(a.std) << ','
            << r.values(method, metric).size() << '\n';
      }
    }
  }
  return out.str();
}

std::string trials_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "experiment,dataset,algorithm,trial,seed,method,metric,value\n";
  for (const TrialReport& r : reports) {
    for (const TrialRecord& t : r.trials) {
      for (const std::string& method : r.methods) {
        const auto it = t.scores.find(method);
        if (it == t.scores.end()) continue;
        for (const std::string& metric : kMetricNames) {
          out << csv(r.name) << ',' << csv(r.dataset) << ',' << to_string(r.algorithm) << ','
              << t.trial << ',' << t.seed << ',' << csv(method) << ',' << metric << ','
              << exact(metric_of(it->second, metric)) << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string report_json(const std::vector<TrialReport>& reports) {
  json all = json::array();
  for (const TrialReport& r : reports) {
    json j;
    j["name"] = r.name;
    j["dataset"] = r.dataset;
    j["algorithm"] = to_string(r.algorithm);
    j["neighbors"] = r.neighbors;
    j["trials_requested"] = r.trials_requested;
    j["methods"] = r.methods;
    json trials = json::array();
    for (const TrialRecord& t : r.trials) {
      json scores = json::object();
      for (const auto& [method, m] : t.scores) {
        scores[method] = {{"ARI", m.ari}, {"NMI", m.nmi}, {"ACC", m.acc}};
      }
      trials.push_back({{"trial", t.trial},
                        {"seed", t.seed},
                        {"m_hat", t.m_hat},
                        {"alignment_residual", t.alignment_residual},
                        {"scores", scores}});
    }
    j["trials"] = trials;
    json aborted = json::array();
    for (const auto& [trial, why] : r.aborted) aborted.push_back({{"trial", trial}, {"error", why}});
    j["aborted"] = aborted;
    json summary = json::object();
    for (const std::string& method : r.methods) {
      for (const std::string& metric : kMetricNames) {
        const Aggregate a = r.aggregate(method, metric);
        summary[method][metric] = {{"mean", a.mean}, {"std", a.std}};
      }
    }
    j["summary"] = summary;
    all.push_back(j);
  }
  return all.dump(2) + "\n";
}

std::vector<TrialReport> parse_report_json(const std::string& text) {
  std::vector<TrialReport> out;
  try {
    const json all = json::parse(text);
    for (const json& j : all) {
      TrialReport r;
      r.name = j.at("name").get<std::string>();
      r.dataset = j.at("dataset").get<std::string>();
      r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
      r.neighbors = j.at("neighbors").get<int>();
      r.trials_requested = j.at("trials_requested").get<int>();
      r.methods = j.at("methods").get<std::vector<std::string>>();
      for (const json& t : j.at("trials")) {
        TrialRecord rec;
        rec.trial = t.at("trial").get<int>();
        rec.seed = t.at("seed").get<std::uint64_t>();
        rec.m_hat = t.at("m_hat").get<Index>();
        rec.alignment_residual = t.at("alignment_residual").get<double>();
        for (const auto& [method, m] : t.at("scores").items()) {
          rec.scores[method] = MetricTriple{m.at("ARI").get<double>(), m.at("NMI").get<double>(),
                                            m.at("ACC").get<double>()};
        }
        r.trials.push_back(std::move(rec));
      }
      for (const json& a : j.at("aborted")) {
        r.aborted.emplace_back(a.at("trial").get<int>(), a.at("error").get<std::string>());
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw IngestionError(std::string("report JSON: ") + e.what());
  }
  return out;
}

std::string markdown_table(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "| Dataset | Algorithm | Method | ARI | NMI | ACC |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const TrialReport& r : reports) {
    for (const std::string& method : r.methods) {
      out << "| " << r.dataset << " | " << to_string(r.algorithm) << " | " << method;
      for (const std::string& metric : kMetricNames) {
        const Aggregate a = r.aggregate(method, metric);
        out << " | " << fixed3(a.mean) << " (" << fixed3(a.std) << ")";
      }
      out << " |\n";
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_report(const std::vector<TrialReport>& reports,
                                               ReportFormat format,
                                               const std::filesystem::path& dir,
                                               const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  switch (format) {
    case ReportFormat::kCsv:
      written = {dir / (stem + "_summary.csv"), dir / (stem + "_trials.csv")};
      write_file(written[0], summary_csv(reports));
      write_file(written[1], trials_csv(reports));
      break;
    case ReportFormat::kJson:
      written = {dir / (stem + ".json")};
      write_file(written[0], report_json(reports));
      break;
    case ReportFormat::kMarkdown:
      written = {dir / (stem + ".md")};
      write_file(written[0], markdown_table(reports));
      break;
  }
  return written;
}

}  // namespace dcc
