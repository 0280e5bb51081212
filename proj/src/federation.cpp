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

#include "dcc/federation.hpp"

#include <exception>
#include <functional>
#include <memory>
#include <set>
#include <thread>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

void send_abort(AnalystEndpoint& endpoint, const std::set<ConnectionId>& to,
                const std::string& reason) {
  for (ConnectionId id : to) {
    try {
      endpoint.send(id, wire::AbortMessage{reason});
    } catch (const Error&) {
      // The user is gone; nothing more to tell it.
    }
  }
}

using Connector = std::function<std::unique_ptr<Channel>()>;

SessionOutcome run_session(const Matrix& x, const LatticePartition& partition,
                           const AnchorDataset& anchor, const SessionConfig& cfg,
                           AnalystEndpoint& endpoint, const Connector& connect) {
  cfg.validate();
  if (partition.c != cfg.c || partition.d != cfg.d) {
    throw ConfigError("partition is " + std::to_string(partition.c) + "x" +
                      std::to_string(partition.d) + ", session expects " + std::to_string(cfg.c) +
                      "x" + std::to_string(cfg.d));
  }
  struct UserSlot {
    PartyId party;
    Matrix block;
    Matrix anchor_block;
    UserSessionReport report;
    std::exception_ptr error;
  };
  std::vector<UserSlot> slots;
  for (int i = 0; i < cfg.c; ++i) {
    for (int j = 0; j < cfg.d; ++j) {
      slots.push_back(UserSlot{PartyId{i, j}, partition.block(x, i, j),
                               partition.column_block(anchor.features, j), {}, nullptr});
    }
  }
  std::vector<std::thread> users;
  for (UserSlot& slot : slots) {
    users.emplace_back([&slot, &cfg, &connect] {
      try {
        auto channel = connect();
        slot.report = user_party_run(slot.party, slot.block, slot.anchor_block, cfg, *channel);
      } catch (...) {
        slot.error = std::current_exception();
      }
    });
  }

  SessionOutcome out;
  std::exception_ptr analyst_error;
  try {
    out.analyst = analyst_party_run(cfg, endpoint);
  } catch (...) {
    analyst_error = std::current_exception();
  }
  for (std::thread& t : users) t.join();
  if (analyst_error) std::rethrow_exception(analyst_error);
  for (const UserSlot& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
  }

  out.labels.assign(static_cast<std::size_t>(x.rows()), -1);
  for (const UserSlot& slot : slots) {
    out.user_counts[slot.party] = slot.report.counts;
    const auto& rows = partition.row_sets[static_cast<std::size_t>(slot.party.row)];
    if (slot.report.labels.size() != rows.size()) {
      throw SessionError("party " + slot.party.to_string() + " recovered " +
                         std::to_string(slot.report.labels.size()) + " labels for " +
                         std::to_string(rows.size()) + " rows");
    }
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto r = static_cast<std::size_t>(rows[t]);
      if (slot.party.col == 0) {
        out.labels[r] = slot.report.labels[t];
      } else if (out.labels[r] != slot.report.labels[t]) {
        throw SessionError("users in row " + std::to_string(slot.party.row + 1) +
                           " disagree on recovered labels");
      }
    }
  }
  return out;
}

}  // namespace

void SessionConfig::validate() const {
  if (c < 1 || d < 1) throw ConfigError("session needs c >= 1 and d >= 1");
  if (k < 1) throw ConfigError("session needs k >= 1");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (neighbors < 1) throw ConfigError("neighbors must be >= 1");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

DcConfig SessionConfig::dc_config() const {
  DcConfig dc;
  dc.algorithm = algorithm;
  dc.mode = mode;
  dc.k = k;
  dc.neighbors = neighbors;
  dc.max_iter = max_iter;
  dc.n_init = n_init;
  dc.seed = master_seed;
  dc.m_hat = m_hat;
  dc.normalize_rows = normalize_rows;
  dc.target_dims = target_dims;
  dc.intermediate = intermediate;
  return dc;
}

UserSessionReport user_party_run(PartyId party, const Matrix& local_block,
                                 const Matrix& anchor_block, const SessionConfig& cfg,
                                 Channel& channel) {
  const std::string who = "party " + party.to_string();
  const Index target = intermediate_dim(cfg.dc_config(), party.col, local_block.cols());
  const Intermediate mine =
      fit_intermediate(party, local_block, anchor_block, target, cfg.intermediate);

  wire::Message reply;
  try {
    channel.send(wire::ShareMessage{mine.share});
    reply = channel.receive(cfg.timeout);
  } catch (const TimeoutError& e) {
    throw TimeoutError(who + ": " + e.what());
  } catch (const DecodeError&) {
    throw;
  } catch (const Error& e) {
    throw SessionError(who + ": " + e.what());
  }

  if (const auto* abort = std::get_if<wire::AbortMessage>(&reply)) {
    throw SessionError(who + ": session aborted by analyst: " + abort->reason);
  }
  const auto* result = std::get_if<wire::ResultMessage>(&reply);
  if (result == nullptr) throw ProtocolError(who + ": expected a result message");
  if (result->party != party || result->result.row != party.row) {
    throw ProtocolError(who + ": result addressed to " + result->party.to_string());
  }
  if (result->result.z_block.rows() != local_block.rows()) {
    throw ProtocolError(who + ": result has " + std::to_string(result->result.z_block.rows()) +
                        " rows, expected " + std::to_string(local_block.rows()));
  }
  UserSessionReport report;
  report.party = party;
  report.labels = user_recover_labels(result->result);
  report.counts = channel.counts();
  return report;
}

AnalystSessionReport analyst_party_run(const SessionConfig& cfg, AnalystEndpoint& endpoint) {
  cfg.validate();
  const auto deadline = Clock::now() + cfg.timeout;
  const std::size_t expected = static_cast<std::size_t>(cfg.c) * static_cast<std::size_t>(cfg.d);
  std::map<PartyId, ConnectionId> senders;
  std::set<ConnectionId> connections;
  std::vector<UserShare> shares;

  while (shares.size() < expected) {
    std::optional<Inbound> in;
    try {
      in = endpoint.receive(deadline);
    } catch (const Error& e) {
      send_abort(endpoint, connections, e.what());
      throw;
    }
    if (!in) {
      std::string missing;
      for (int i = 0; i < cfg.c; ++i) {
        for (int j = 0; j < cfg.d; ++j) {
          if (!senders.count(PartyId{i, j})) missing += " " + PartyId{i, j}.to_string();
        }
      }
      const std::string reason = "timed out waiting for shares from" + missing;
      send_abort(endpoint, connections, reason);
      throw SessionError(reason);
    }
    connections.insert(in->from);
    auto* share = std::get_if<wire::ShareMessage>(&in->message);
    if (share == nullptr) {
      const std::string reason = "analyst expected only share messages";
      send_abort(endpoint, connections, reason);
      throw ProtocolError(reason);
    }
    const PartyId p = share->share.party;
    if (p.row >= cfg.c || p.col >= cfg.d) {
      const std::string reason = "share from party " + p.to_string() + " outside the " +
                                 std::to_string(cfg.c) + "x" + std::to_string(cfg.d) + " lattice";
      send_abort(endpoint, connections, reason);
      throw ProtocolError(reason);
    }
    if (!senders.emplace(p, in->from).second) {
      const std::string reason = "duplicate share from party " + p.to_string();
      send_abort(endpoint, connections, reason);
      throw ProtocolError(reason);
    }
    shares.push_back(std::move(share->share));
  }

  AnalystSessionReport report;
  CollaborationModel model;
  AnalystOutcome outcome;
  try {
    model = build_collaboration(shares, cfg.mode, cfg.m_hat);
    const Matrix z = make_clustering_representation(model, cfg.algorithm, cfg.k, cfg.neighbors,
                                                    cfg.normalize_rows);
    outcome = analyst_cluster(z, cfg.k, cfg.max_iter, analyst_seed(cfg.master_seed),
                              model.row_block_sizes, cfg.algorithm, cfg.n_init);
  } catch (const Error& e) {
    send_abort(endpoint, connections, e.what());
    throw;
  }

  for (const auto& [party, conn] : senders) {
    wire::ResultMessage msg;
    msg.party = party;
    msg.k = cfg.k;
    msg.mode = cfg.mode;
    msg.m_hat = model.m_hat;
    msg.result = outcome.results[static_cast<std::size_t>(party.row)];
    endpoint.send(conn, msg);
  }

  report.labels = outcome.model.labels;
  std::size_t at = 0;
  for (Index size : model.row_block_sizes) {
    const auto n = static_cast<std::size_t>(size);
    report.row_labels.emplace_back(report.labels.begin() + static_cast<std::ptrdiff_t>(at),
                                   report.labels.begin() + static_cast<std::ptrdiff_t>(at + n));
    at += n;
  }
  report.counts = endpoint.counts();
  report.m_hat = model.m_hat;
  report.alignment_residual = model.alignment_residual;
  report.warnings = model.warnings;
  report.model = std::move(outcome.model);
  return report;
}

SessionOutcome run_in_process_session(const Matrix& x, const LatticePartition& partition,
                                      const AnchorDataset& anchor, const SessionConfig& cfg) {
  InProcessHub hub;
  return run_session(x, partition, anchor, cfg, hub, [&hub] { return hub.connect(); });
}

SessionOutcome run_loopback_tcp_session(const Matrix& x, const LatticePartition& partition,
                                        const AnchorDataset& anchor, const SessionConfig& cfg) {
  TcpAnalystEndpoint endpoint("127.0.0.1", 0);
  const std::uint16_t port = endpoint.port();
  const auto timeout = cfg.timeout;
  return run_session(x, partition, anchor, cfg, endpoint,
                     [port, timeout] { return tcp_connect("127.0.0.1", port, timeout); });
}

}  // namespace dcc
