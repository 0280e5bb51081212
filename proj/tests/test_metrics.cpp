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

#include "dcc/errors.hpp"
#include "dcc/metrics.hpp"
#include "dcc/random.hpp"
#include "oracles.hpp"

using namespace dcc;

namespace {

using Labels = std::vector<int>;

Labels random_labels(Rng& rng, std::size_t n, int k) {
  Labels out(n);
  for (auto& l : out) l = static_cast<int>(uniform01(rng) * k);
  return out;
}

}  // namespace

TEST_CASE("ARI examples") {
  const Labels a{0, 0, 1, 1};
  CHECK(ari(a, a) == 1.0);
  CHECK(ari(a, Labels{1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(ari(a, Labels{0, 1, 0, 1}) == doctest::Approx(-0.5));
  CHECK(ari(Labels{0, 0, 0}, Labels{4, 4, 4}) == 1.0);
}

TEST_CASE("NMI examples") {
  const Labels a{0, 0, 1, 1};
  CHECK(nmi(a, a) == doctest::Approx(1.0));
  CHECK(nmi(a, Labels{0, 0, 0, 0}) == 0.0);
  CHECK(nmi(a, Labels{0, 1, 0, 1}) == doctest::Approx(0.0));
  CHECK(nmi(Labels{2, 2}, Labels{7, 7}) == 1.0);
}

TEST_CASE("ACC examples") {
  const Labels a{0, 0, 1, 1};
  CHECK(acc(a, Labels{1, 1, 0, 0}) == 1.0);
  CHECK(acc(a, Labels{0, 1, 0, 1}) == 0.5);
  // More predicted clusters than classes: one cluster cannot be matched.
  CHECK(acc(Labels{0, 0, 0, 1}, Labels{0, 1, 2, 3}) == 0.5);
}

TEST_CASE("metrics reject length mismatches") {
  CHECK_THROWS_AS(ari(Labels{0, 1}, Labels{0}), ContractViolation);
  CHECK_THROWS_AS(nmi(Labels{0, 1}, Labels{0}), ContractViolation);
  CHECK_THROWS_AS(acc(Labels{0, 1}, Labels{0}), ContractViolation);
  CHECK_THROWS_AS(ari(Labels{0}, Labels{0}), ContractViolation);
}

TEST_CASE("contingency marginals") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Labels a = random_labels(rng, 12, 4);
    const Labels b = random_labels(rng, 12, 3);
    const Contingency c = Contingency::build(a, b);
    long long total = 0;
    for (std::size_t i = 0; i < c.u.size(); ++i) {
      long long row = 0;
      for (long long v : c.u[i]) row += v;
      CHECK(row == c.a[i]);
      total += row;
    }
    for (std::size_t j = 0; j < c.b.size(); ++j) {
      long long col = 0;
      for (const auto& r : c.u) col += r[j];
      CHECK(col == c.b[j]);
    }
    CHECK(total == c.n);
    CHECK(c.n == 12);
  }
}

TEST_CASE("metrics equal brute-force oracles on random label pairs") {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 14);
    const int ka = 1 + static_cast<int>(uniform01(rng) * 5);
    const int kb = 1 + static_cast<int>(uniform01(rng) * 5);
    const Labels a = random_labels(rng, n, ka);
    const Labels b = random_labels(rng, n, kb);
    CHECK(std::abs(ari(a, b) - oracle::ari(a, b)) < 1e-12);
    CHECK(std::abs(nmi(a, b) - oracle::nmi(a, b)) < 1e-12);
    CHECK(std::abs(acc(a, b) - oracle::acc(a, b)) < 1e-12);
  }
}

TEST_CASE("metric invariants: symmetry, relabeling, bounds") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const Labels a = random_labels(rng, 15, 4);
    const Labels b = random_labels(rng, 15, 3);
    Labels relabeled = b;
    for (auto& l : relabeled) l = (l + 2) * 10;
    CHECK(ari(a, b) == doctest::Approx(ari(b, a)));
    CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)));
    CHECK(ari(a, relabeled) == doctest::Approx(ari(a, b)));
    CHECK(nmi(a, relabeled) == doctest::Approx(nmi(a, b)));
    CHECK(acc(a, relabeled) == doctest::Approx(acc(a, b)));
    CHECK(ari(a, b) <= 1.0 + 1e-12);
    CHECK(nmi(a, b) >= 0.0);
    CHECK(nmi(a, b) <= 1.0 + 1e-12);
    CHECK(acc(a, b) >= 1.0 / 15.0 - 1e-12);
    CHECK(acc(a, b) <= 1.0);
  }
}

TEST_CASE("assignment is optimal against enumeration") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 6);
    std::vector<std::vector<long long>> w(n, std::vector<long long>(n));
    for (auto& row : w) {
      for (auto& v : row) v = static_cast<long long>(uniform01(rng) * 20) - 5;
    }
    const auto match = max_weight_assignment(w);
    std::vector<int> seen(n, 0);
    long long got = 0;
    for (std::size_t r = 0; r < n; ++r) {
      ++seen[static_cast<std::size_t>(match[r])];
      got += w[r][static_cast<std::size_t>(match[r])];
    }
    for (int s : seen) CHECK(s == 1);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = std::numeric_limits<long long>::min();
    do {
      long long s = 0;
      for (std::size_t r = 0; r < n; ++r) s += w[r][perm[r]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == best);
  }
}
