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

#include "dcc/datasets.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

namespace fs = std::filesystem;

const std::string kKeel = "https://sci2s.ugr.es/keel/dataset/data/classification/";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint32_t le32(std::string_view s, std::size_t at) {
  if (at + 4 > s.size()) throw IngestionError("zip: truncated archive");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint16_t le16(std::string_view s, std::size_t at) {
  if (at + 2 > s.size()) throw IngestionError("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw IngestionError("zip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) {
    throw IngestionError("zip: corrupt deflate stream");
  }
  return out;
}

std::size_t collect(char* ptr, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(ptr, size * n);
  return size * n;
}

std::string download(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (curl == nullptr) throw IngestionError("curl initialisation failed");
  std::string body;
  char err[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 20L);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, 300L);
  curl_easy_setopt(curl, CURLOPT_USERAGENT, "dc-cluster");
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, collect);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, err);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) {
    throw IngestionError("download of " + url + " failed: " +
                         (err[0] != '\0' ? std::string(err) : curl_easy_strerror(rc)));
  }
  return body;
}

bool is_zip(std::string_view s) { return s.size() >= 4 && s.substr(0, 4) == "PK\x03\x04"; }

}  // namespace

const std::vector<DatasetInfo>& known_datasets() {
  static const std::vector<DatasetInfo> all = {
      {"iris", kKeel + "iris.zip", "iris.dat",
       "d2128b2de6cb639c7345d11033a25666c7a73d738e7c9b00b23746a97870d273", 150, 4, 3},
      {"rice",
       "https://archive.ics.uci.edu/static/public/545/rice+cammeo+and+osmancik.zip",
       "Rice_Cammeo_Osmancik.arff", "", 3810, 7, 2},
      {"penbased", kKeel + "penbased.zip", "penbased.dat",
       "fed074d594ee516970af45bd21ac5a0f48807e0427c3e5ff968d2149dc8ba336", 10992, 16, 10},
      {"heart", kKeel + "heart.zip", "heart.dat",
       "47581ce18051afdd11751d9b36708d88b414a2be606114bfe6df930b2856960c", 270, 13, 2},
      {"bank",
       "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/"
       "data_banknote_authentication.txt",
       "", "", 1372, 4, 2},
      {"phoneme", kKeel + "phoneme.zip", "phoneme.dat",
       "0b8927ca4b5d7714783a47e7e22fd65c2782900ebe20145f69a86c1281c8aed1", 5404, 5, 2},
  };
  return all;
}

const DatasetInfo& dataset_info(const std::string& name) {
  for (const DatasetInfo& d : known_datasets()) {
    if (d.name == name) return d;
  }
  std::string names;
  for (const DatasetInfo& d : known_datasets()) names += " " + d.name;
  throw ConfigError("unknown dataset '" + name + "'; known:" + names);
}

fs::path default_cache_dir() {
  if (const char* dir = std::getenv("DCC_CACHE_DIR"); dir != nullptr && *dir != '\0') return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return fs::path(xdg) / "dc-cluster";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return fs::path(home) / ".cache" / "dc-cluster";
  }
  return fs::path(".dc-cluster-cache");
}

fs::path locate_dataset(const std::string& name, const std::vector<fs::path>& extra) {
  std::vector<fs::path> dirs = extra;
  if (const char* dir = std::getenv("DCC_DATA_DIR"); dir != nullptr && *dir != '\0') {
    dirs.emplace_back(dir);
  }
  dirs.emplace_back("data");
  dirs.push_back(default_cache_dir());
  std::string tried;
  for (const fs::path& dir : dirs) {
    const fs::path candidate = dir / (name + ".csv");
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) return candidate;
    tried += " " + candidate.string();
  }
  throw IngestionError("dataset '" + name + "' not found (looked in" + tried +
                       "); run `dc-cluster datasets fetch " + name + "`");
}

std::string convert_to_csv(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string line;
  std::string body;
  std::size_t fields = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '@' || line[first] == '%') continue;
    std::vector<std::string> parts;
    std::string item;
    std::istringstream cells(line);
    while (std::getline(cells, item, ',')) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      parts.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    if (fields == 0) {
      if (parts.size() < 2) {
        throw IngestionError("convert: line " + std::to_string(line_no) +
                             " needs at least one feature and a label");
      }
      fields = parts.size();
    } else if (parts.size() != fields) {
      throw IngestionError("convert: line " + std::to_string(line_no) + " has " +
                           std::to_string(parts.size()) + " fields, expected " +
                           std::to_string(fields));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) body += ',';
      body += parts[i];
    }
    body += '\n';
  }
  if (fields == 0) throw IngestionError("convert: no data rows");
  std::string header;
  for (std::size_t i = 1; i < fields; ++i) header += "x" + std::to_string(i) + ",";
  header += "class\n";
  return header + body;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IngestionError("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string unzip_member(std::string_view zip, const std::string& member) {
  // Locate the end-of-central-directory record from the back.
  if (zip.size() < 22) throw IngestionError("zip: archive too small");
  std::size_t eocd = std::string_view::npos;
  for (std::size_t at = zip.size() - 22 + 1; at-- > 0;) {
    if (le32(zip, at) == 0x06054b50) {
      eocd = at;
      break;
    }
    if (zip.size() - at > 22 + 65535) break;
  }
  if (eocd == std::string_view::npos) throw IngestionError("zip: no central directory");
  const std::uint16_t entries = le16(zip, eocd + 10);
  std::size_t at = le32(zip, eocd + 16);
  for (std::uint16_t e = 0; e < entries; ++e) {
    if (le32(zip, at) != 0x02014b50) throw IngestionError("zip: bad central directory entry");
    const std::uint16_t method = le16(zip, at + 10);
    const std::uint32_t csize = le32(zip, at + 20);
    const std::uint32_t usize = le32(zip, at + 24);
    const std::uint16_t name_len = le16(zip, at + 28);
    const std::uint16_t extra_len = le16(zip, at + 30);
    const std::uint16_t comment_len = le16(zip, at + 32);
    const std::uint32_t local = le32(zip, at + 42);
    if (at + 46 + name_len > zip.size()) throw IngestionError("zip: truncated name");
    const std::string name(zip.substr(at + 46, name_len));
    at += 46u + name_len + extra_len + comment_len;
    const bool match = name.size() >= member.size() &&
                       name.compare(name.size() - member.size(), member.size(), member) == 0;
    if (!match) continue;
    if (le32(zip, local) != 0x04034b50) throw IngestionError("zip: bad local header");
    const std::size_t data_at = local + 30u + le16(zip, local + 26) + le16(zip, local + 28);
    if (data_at + csize > zip.size()) throw IngestionError("zip: truncated member data");
    const std::string_view data = zip.substr(data_at, csize);
    if (method == 0) return std::string(data);
    if (method == 8) return inflate_raw(data, usize);
    throw IngestionError("zip: unsupported compression method " + std::to_string(method));
  }
  throw IngestionError("zip: member '" + member + "' not found");
}

FetchResult fetch_dataset(const std::string& name, const fs::path& cache,
                          const std::optional<fs::path>& from_file) {
  const DatasetInfo& info = dataset_info(name);
  const std::string raw = from_file ? read_file(*from_file) : download(info.url);
  std::string text = raw;
  if (is_zip(raw)) {
    if (info.member.empty()) throw IngestionError(name + ": unexpected zip archive");
    text = unzip_member(raw, info.member);
  }
  const std::string csv = convert_to_csv(text);
  FetchResult result;
  result.sha256 = sha256_hex(csv);
  if (!info.sha256.empty()) {
    if (result.sha256 != info.sha256) {
      throw IngestionError(name + ": checksum mismatch (got " + result.sha256 + ", expected " +
                           info.sha256 + ")");
    }
    result.verified = true;
  }
  std::error_code ec;
  fs::create_directories(cache, ec);
  if (ec) throw IngestionError("cannot create " + cache.string() + ": " + ec.message());
  result.path = cache / (name + ".csv");
  std::ofstream out(result.path, std::ios::binary);
  out << csv;
  if (!out) throw IngestionError("cannot write " + result.path.string());
  return result;
}

}  // namespace dcc
