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

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcc/collaboration.hpp"
#include "dcc/data.hpp"
#include "dcc/transport.hpp"

namespace dcc {

struct SessionConfig {
  int c = 1;
  int d = 1;
  int k = 2;
  Algorithm algorithm = Algorithm::kKMeans;
  GMode mode = GMode::kAffine;
  IntermediateKind intermediate = IntermediateKind::kStandardizePca;
  int neighbors = kDefaultNeighbors;
  int max_iter = kDefaultMaxIter;
  int n_init = 1;
  std::uint64_t master_seed = 0;
  std::optional<Index> m_hat;
  bool normalize_rows = false;
  std::vector<Index> target_dims;  // per column block; m_j - 1 when empty
  std::chrono::milliseconds timeout = default_timeout();

  void validate() const;
  DcConfig dc_config() const;
};

struct UserSessionReport {
  PartyId party;
  std::vector<int> labels;
  MessageCounts counts;
};

// One upload, one download. The map f never leaves this function.
UserSessionReport user_party_run(PartyId party, const Matrix& local_block,
                                 const Matrix& anchor_block, const SessionConfig& cfg,
                                 Channel& channel);

struct AnalystSessionReport {
  std::vector<int> labels;  // row blocks stacked in order
  std::vector<std::vector<int>> row_labels;
  MessageCounts counts;
  Index m_hat = 0;
  double alignment_residual = 0.0;
  std::vector<std::string> warnings;
  ClusterModel model;
};

// Waits for all c*d shares, clusters, and sends each user its row's result.
// Duplicate or out-of-range shares raise ProtocolError and missing ones
// SessionError; in both cases every connected user is sent an abort first.
AnalystSessionReport analyst_party_run(const SessionConfig& cfg, AnalystEndpoint& endpoint);

struct SessionOutcome {
  std::vector<int> labels;  // original row order
  AnalystSessionReport analyst;
  std::map<PartyId, MessageCounts> user_counts;
};

// Runs every user on its own thread against an in-process hub.
SessionOutcome run_in_process_session(const Matrix& x, const LatticePartition& partition,
                                      const AnchorDataset& anchor, const SessionConfig& cfg);

// Same over loopback TCP.
SessionOutcome run_loopback_tcp_session(const Matrix& x, const LatticePartition& partition,
                                        const AnchorDataset& anchor, const SessionConfig& cfg);

}  // namespace dcc
