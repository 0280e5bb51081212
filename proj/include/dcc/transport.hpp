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
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "dcc/wire.hpp"

namespace dcc {

struct MessageCounts {
  std::size_t sent = 0;
  std::size_t received = 0;

  bool operator==(const MessageCounts&) const = default;
};

using Clock = std::chrono::steady_clock;

// 60 s unless DCC_TIMEOUT_SECS holds a positive number.
std::chrono::milliseconds default_timeout();

// A user's link to the analyst. Every message crosses as an encoded frame.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const wire::Message& m) = 0;
  // Throws TimeoutError if no complete frame arrives in time and
  // SessionError if the link is gone.
  virtual wire::Message receive(std::chrono::milliseconds timeout) = 0;
  MessageCounts counts() const { return counts_; }

 protected:
  MessageCounts counts_;
};

using ConnectionId = std::uint64_t;

struct Inbound {
  ConnectionId from = 0;
  wire::Message message;
};

// The analyst's side: many users, addressed by connection.
class AnalystEndpoint {
 public:
  virtual ~AnalystEndpoint() = default;
  // nullopt once the deadline passes without a frame.
  virtual std::optional<Inbound> receive(Clock::time_point deadline) = 0;
  virtual void send(ConnectionId to, const wire::Message& m) = 0;
  MessageCounts counts() const { return counts_; }

 protected:
  MessageCounts counts_;
};

// Ordered in-memory queues; frames are still encoded and decoded so both
// transports move identical bytes.
class InProcessHub : public AnalystEndpoint {
 public:
  InProcessHub();
  ~InProcessHub() override;

  std::unique_ptr<Channel> connect();

  std::optional<Inbound> receive(Clock::time_point deadline) override;
  void send(ConnectionId to, const wire::Message& m) override;

  struct State;

 private:
  std::shared_ptr<State> state_;
};

// Listens on host:port (port 0 picks a free one). Each connection gets a
// reader thread that queues whole frames.
class TcpAnalystEndpoint : public AnalystEndpoint {
 public:
  TcpAnalystEndpoint(const std::string& host, std::uint16_t port);
  ~TcpAnalystEndpoint() override;
  TcpAnalystEndpoint(const TcpAnalystEndpoint&) = delete;
  TcpAnalystEndpoint& operator=(const TcpAnalystEndpoint&) = delete;

  std::uint16_t port() const;

  std::optional<Inbound> receive(Clock::time_point deadline) override;
  void send(ConnectionId to, const wire::Message& m) override;

  struct State;

 private:
  std::unique_ptr<State> state_;
};

// Retries the connection until `timeout` elapses, then throws TimeoutError.
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds timeout);

// "host:port" -> (host, port). Throws ConfigError.
std::pair<std::string, std::uint16_t> parse_host_port(const std::string& text);

}  // namespace dcc
