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

#include <thread>

#include "dcc/data.hpp"
#include "dcc/errors.hpp"
#include "dcc/federation.hpp"
#include "dcc/metrics.hpp"
#include "fixtures.hpp"

using namespace dcc;
using namespace std::chrono_literals;

namespace {

struct Case {
  LabeledDataset data;
  LatticePartition partition;
  AnchorDataset anchor;
  SessionConfig cfg;
};

Case blob_session(std::uint64_t seed, int c = 2, int d = 2,
                  Algorithm algorithm = Algorithm::kKMeans) {
  Case s;
  s.data = make_blobs(3, 80, seed);
  s.partition = partition_lattice(s.data, c, d, Assignment::kIidRandom, seed + 1);
  s.anchor = generate_anchor(feature_bounds(s.data.features), s.data.rows(), seed + 2);
  s.cfg.c = c;
  s.cfg.d = d;
  s.cfg.k = 3;
  s.cfg.algorithm = algorithm;
  s.cfg.n_init = 3;
  s.cfg.master_seed = seed + 3;
  s.cfg.timeout = 20s;
  return s;
}

wire::ShareMessage share_from(PartyId p) {
  wire::ShareMessage s;
  s.share.party = p;
  s.share.x_tilde = Matrix::Ones(3, 1);
  s.share.anchor_tilde = Matrix::Ones(3, 1);
  return s;
}

}  // namespace

TEST_CASE("in-process session reproduces the direct pipeline") {
  for (Algorithm alg : {Algorithm::kKMeans, Algorithm::kSpectral}) {
    const Case s = blob_session(1, 2, 2, alg);
    const SessionOutcome out = run_in_process_session(s.data.features, s.partition, s.anchor, s.cfg);
    const DcOutcome direct = run_dc_clustering(s.data.features, s.partition, s.anchor, s.cfg.dc_config());
    CHECK(out.labels == direct.labels);
    CHECK(out.analyst.labels == direct.analyst_model.labels);
    CHECK(out.analyst.m_hat == direct.model.m_hat);
  }
}

TEST_CASE("single-round message accounting") {
  const Case s = blob_session(2);
  const SessionOutcome out = run_in_process_session(s.data.features, s.partition, s.anchor, s.cfg);
  CHECK(out.analyst.counts == MessageCounts{4, 4});
  REQUIRE(out.user_counts.size() == 4);
  for (const auto& [party, counts] : out.user_counts) CHECK(counts == MessageCounts{1, 1});
}

TEST_CASE("loopback TCP reproduces in-process labels") {
  const Case s = blob_session(3);
  const SessionOutcome mem = run_in_process_session(s.data.features, s.partition, s.anchor, s.cfg);
  const SessionOutcome tcp = run_loopback_tcp_session(s.data.features, s.partition, s.anchor, s.cfg);
  CHECK(mem.labels == tcp.labels);
  CHECK(tcp.analyst.counts == MessageCounts{4, 4});
  for (const auto& [party, counts] : tcp.user_counts) CHECK(counts == MessageCounts{1, 1});
  CHECK(mem.analyst.model.centroids == tcp.analyst.model.centroids);
}

TEST_CASE("identical maps across rows give a near-zero residual") {
  // Two row blocks holding the same points.
  LabeledDataset base = make_blobs(2, 30, 4);
  LabeledDataset twice;
  twice.features.resize(120, 6);
  twice.features << base.features, base.features;
  twice.labels = base.labels;
  twice.labels.insert(twice.labels.end(), base.labels.begin(), base.labels.end());
  const LatticePartition p = partition_lattice(twice, 2, 1, Assignment::kContiguous, 0);
  SessionConfig cfg;
  cfg.c = 2;
  cfg.d = 1;
  cfg.k = 2;
  cfg.timeout = 20s;
  const AnchorDataset anchor = generate_anchor(feature_bounds(twice.features), 120, 5);
  const SessionOutcome out = run_in_process_session(twice.features, p, anchor, cfg);
  CHECK(out.analyst.alignment_residual < 1e-8);
}

TEST_CASE("duplicate share aborts the session naming the party") {
  InProcessHub hub;
  auto a = hub.connect();
  auto b = hub.connect();
  a->send(share_from(PartyId{0, 0}));
  b->send(share_from(PartyId{0, 0}));
  SessionConfig cfg;
  cfg.c = 2;
  cfg.d = 1;
  cfg.timeout = 5s;
  try {
    analyst_party_run(cfg, hub);
    FAIL("expected a protocol error");
  } catch (const ProtocolError& e) {
    CHECK(std::string(e.what()).find("(1,1)") != std::string::npos);
  }
  for (auto* ch : {a.get(), b.get()}) {
    const wire::Message m = ch->receive(1s);
    REQUIRE(std::holds_alternative<wire::AbortMessage>(m));
    CHECK(std::get<wire::AbortMessage>(m).reason.find("duplicate") != std::string::npos);
  }
}

TEST_CASE("out-of-lattice share is rejected") {
  InProcessHub hub;
  auto a = hub.connect();
  a->send(share_from(PartyId{3, 0}));
  SessionConfig cfg;
  cfg.c = 2;
  cfg.d = 1;
  cfg.timeout = 5s;
  CHECK_THROWS_AS(analyst_party_run(cfg, hub), ProtocolError);
}

TEST_CASE("missing share times out and aborts the users that did connect") {
  InProcessHub hub;
  auto a = hub.connect();
  a->send(share_from(PartyId{0, 0}));
  SessionConfig cfg;
  cfg.c = 2;
  cfg.d = 1;
  cfg.timeout = 200ms;
  try {
    analyst_party_run(cfg, hub);
    FAIL("expected a session error");
  } catch (const SessionError& e) {
    CHECK(std::string(e.what()).find("(2,1)") != std::string::npos);
  }
  CHECK(std::holds_alternative<wire::AbortMessage>(a->receive(1s)));
}

TEST_CASE("user times out when no result arrives") {
  InProcessHub hub;
  auto ch = hub.connect();
  SessionConfig cfg;
  cfg.timeout = 150ms;
  Rng rng(1);
  const Matrix block = fixture::uniform_matrix(10, 3, rng);
  CHECK_THROWS_AS(user_party_run(PartyId{}, block, block, cfg, *ch), TimeoutError);
}

TEST_CASE("aborted user reports the analyst's reason") {
  InProcessHub hub;
  auto ch = hub.connect();
  SessionConfig cfg;
  cfg.timeout = 5s;
  Rng rng(1);
  const Matrix block = fixture::uniform_matrix(10, 3, rng);
  std::thread analyst([&hub] {
    const auto in = hub.receive(Clock::now() + 5s);
    REQUIRE(in.has_value());
    hub.send(in->from, wire::AbortMessage{"not today"});
  });
  try {
    user_party_run(PartyId{}, block, block, cfg, *ch);
    FAIL("expected a session error");
  } catch (const SessionError& e) {
    CHECK(std::string(e.what()).find("not today") != std::string::npos);
  }
  analyst.join();
}

TEST_CASE("unreachable analyst gives a timeout") {
  std::uint16_t port = 0;
  {
    TcpAnalystEndpoint probe("127.0.0.1", 0);
    port = probe.port();
  }
  const auto start = Clock::now();
  CHECK_THROWS_AS(tcp_connect("127.0.0.1", port, 300ms), TimeoutError);
  CHECK(Clock::now() - start >= 300ms);
}

TEST_CASE("TCP carries frames unchanged in both directions") {
  TcpAnalystEndpoint endpoint("127.0.0.1", 0);
  auto ch = tcp_connect("127.0.0.1", endpoint.port(), 5s);
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const wire::Message m = fixture::random_message(rng);
    ch->send(m);
    const auto in = endpoint.receive(Clock::now() + 5s);
    REQUIRE(in.has_value());
    CHECK(fixture::same_message(in->message, m));
    endpoint.send(in->from, m);
    CHECK(fixture::same_message(ch->receive(5s), m));
  }
  CHECK(ch->counts() == MessageCounts{20, 20});
  CHECK(endpoint.counts() == MessageCounts{20, 20});
}

TEST_CASE("host:port parsing") {
  CHECK(parse_host_port("127.0.0.1:9000") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 9000});
  CHECK(parse_host_port("localhost:0").second == 0);
  CHECK_THROWS_AS(parse_host_port("nohost"), ConfigError);
  CHECK_THROWS_AS(parse_host_port("h:70000"), ConfigError);
  CHECK_THROWS_AS(parse_host_port("h:x"), ConfigError);
}

TEST_CASE("session config validation") {
  SessionConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.k = 2;
  cfg.c = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
