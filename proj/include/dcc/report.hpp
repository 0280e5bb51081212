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

#include <filesystem>
#include <string>
#include <vector>

#include "dcc/experiment.hpp"

namespace dcc {

enum class ReportFormat { kCsv, kJson, kMarkdown };

ReportFormat parse_report_format(const std::string& s);

// One row per (dataset, method, metric) with mean and std.
std::string summary_csv(const std::vector<TrialReport>& reports);
// Long format: one row per (dataset, trial, method, metric).
std::string trials_csv(const std::vector<TrialReport>& reports);
std::string report_json(const std::vector<TrialReport>& reports);
std::vector<TrialReport> parse_report_json(const std::string& text);
// One table row per (dataset, method): mean (std) for ARI, NMI, ACC.
std::string markdown_table(const std::vector<TrialReport>& reports);

// Writes the files for `format` into dir and returns their paths.
std::vector<std::filesystem::path> emit_report(const std::vector<TrialReport>& reports,
                                               ReportFormat format,
                                               const std::filesystem::path& dir,
                                               const std::string& stem);

}  // namespace dcc
