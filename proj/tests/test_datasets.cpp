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


#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcc/data.hpp"
#include "dcc/datasets.hpp"
#include "dcc/errors.hpp"

using namespace dcc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path kFixtures = fs::path(DCC_SOURCE_DIR) / "tests" / "data";

}  // namespace

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("KEEL and ARFF text converts to a labeled CSV") {
  const std::string keel =
      "@relation toy\n"
      "@attribute a real\n"
      "@data\n"
      "% comment\n"
      "1.0, 2.0, yes\r\n"
      "\n"
      "3.5,4, no\n";
  CHECK(convert_to_csv(keel) == "x1,x2,class\n1.0,2.0,yes\n3.5,4,no\n");
  CHECK(convert_to_csv("5,6,7,0\n") == "x1,x2,x3,class\n5,6,7,0\n");
  CHECK_THROWS_AS(convert_to_csv("1,2\n1,2,3\n"), IngestionError);
  CHECK_THROWS_AS(convert_to_csv("@data\n"), IngestionError);
  CHECK_THROWS_AS(convert_to_csv("onlyone\n"), IngestionError);
}

TEST_CASE("zip members: deflated and stored") {
  const std::string zip = slurp(kFixtures / "iris.zip");
  const std::string dat = unzip_member(zip, "iris.dat");
  CHECK(dat.find("Iris-setosa") != std::string::npos);
  CHECK(unzip_member(zip, "README.txt") == "stored member\n");
  CHECK_THROWS_AS(unzip_member(zip, "nothere.dat"), IngestionError);
  CHECK_THROWS_AS(unzip_member("not a zip", "iris.dat"), IngestionError);
}

TEST_CASE("fetch from a local archive verifies and matches the bundled copy") {
  const fs::path cache = fs::temp_directory_path() / "dcc_cache_test";
  fs::remove_all(cache);
  const FetchResult r = fetch_dataset("iris", cache, kFixtures / "iris.zip");
  CHECK(r.verified);
  CHECK(r.path == cache / "iris.csv");
  CHECK(slurp(r.path) == slurp(fs::path(DCC_SOURCE_DIR) / "data" / "iris.csv"));
  const LabeledDataset ds = load_csv(r.path, "class");
  CHECK(ds.rows() == 150);
  CHECK(locate_dataset("iris", {cache}) == cache / "iris.csv");
}

TEST_CASE("checksum mismatch is refused") {
  const fs::path bogus = fs::temp_directory_path() / "dcc_bogus_heart.dat";
  std::ofstream(bogus) << "1,2,3\n4,5,6\n";
  const fs::path cache = fs::temp_directory_path() / "dcc_cache_bad";
  CHECK_THROWS_AS(fetch_dataset("heart", cache, bogus), IngestionError);
  CHECK_FALSE(fs::exists(cache / "heart.csv"));
}

TEST_CASE("registry") {
  CHECK(dataset_info("iris").clusters == 3);
  CHECK(dataset_info("rice").rows == 3810);
  CHECK(dataset_info("rice").features == 7);
  CHECK_THROWS_AS(dataset_info("mnist"), ConfigError);
  for (const DatasetInfo& d : known_datasets()) {
    CHECK_FALSE(d.url.empty());
    CHECK(d.clusters >= 2);
  }
}

TEST_CASE("missing datasets give a fetch hint") {
  try {
    locate_dataset("phoneme", {fs::temp_directory_path() / "dcc_nowhere"});
    // A cached copy from an earlier fetch is fine too.
  } catch (const IngestionError& e) {
    CHECK(std::string(e.what()).find("datasets fetch phoneme") != std::string::npos);
  }
  CHECK_THROWS_AS(locate_dataset("not-a-dataset", {}), Error);
}

TEST_CASE("cache directory honours DCC_CACHE_DIR") {
  setenv("DCC_CACHE_DIR", "/tmp/dcc-cache-env", 1);
  CHECK(default_cache_dir() == fs::path("/tmp/dcc-cache-env"));
  unsetenv("DCC_CACHE_DIR");
}
