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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcc {

// An open dataset the CLI knows how to download and convert.
struct DatasetInfo {
  std::string name;
  std::string url;
  std::string member;  // file inside the zip archive; empty for plain files
  std::string sha256;  // of the converted CSV; empty when not yet pinned
  int rows = 0;
  int features = 0;
  int clusters = 0;
};

const std::vector<DatasetInfo>& known_datasets();

// Throws ConfigError for an unknown name.
const DatasetInfo& dataset_info(const std::string& name);

// $DCC_CACHE_DIR, else $XDG_CACHE_HOME/dc-cluster, else ~/.cache/dc-cluster.
std::filesystem::path default_cache_dir();

// Where <name>.csv is looked for: `extra` first, then $DCC_DATA_DIR,
// ./data, and the cache directory.
std::filesystem::path locate_dataset(const std::string& name,
                                     const std::vector<std::filesystem::path>& extra = {});

// KEEL .dat, ARFF or headerless comma-separated text -> CSV with header
// x1..xm,class. '@' and '%' lines are dropped; the last field is the label.
std::string convert_to_csv(std::string_view raw);

std::string sha256_hex(std::string_view data);

// Extracts the member whose path ends with `member` (stored or deflated).
std::string unzip_member(std::string_view archive, const std::string& member);

struct FetchResult {
  std::filesystem::path path;
  std::string sha256;
  bool verified = false;  // checksum matched a pinned value
};

// Downloads (or reads `from_file`, a previously downloaded archive or
// file), converts, verifies and writes <cache>/<name>.csv.
FetchResult fetch_dataset(const std::string& name, const std::filesystem::path& cache,
                          const std::optional<std::filesystem::path>& from_file = std::nullopt);

}  // namespace dcc
