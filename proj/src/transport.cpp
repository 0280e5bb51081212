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

#include "dcc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "dcc/errors.hpp"

namespace dcc {

namespace {

using Bytes = std::vector<std::uint8_t>;

std::string errno_text(const char* op) { return std::string(op) + ": " + std::strerror(errno); }

// Blocking FIFO of encoded frames tagged with their sender.
class FrameQueue {
 public:
  void push(ConnectionId from, Bytes frame) {
    {
      std::lock_guard lock(mu_);
      items_.emplace_back(from, std::move(frame));
    }
    cv_.notify_all();
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  // nullopt on deadline; throws SessionError when closed and drained.
  std::optional<std::pair<ConnectionId, Bytes>> pop(Clock::time_point deadline) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_until(lock, deadline, [&] { return !items_.empty() || closed_; })) {
      return std::nullopt;
    }
    if (items_.empty()) throw SessionError("connection closed");
    auto item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<ConnectionId, Bytes>> items_;
  bool closed_ = false;
};

void write_all(int fd, const Bytes& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SessionError(errno_text("send"));
    }
    done += static_cast<std::size_t>(n);
  }
}

enum class ReadStatus { kOk, kClosed, kTimeout };

ReadStatus read_exact(int fd, std::uint8_t* out, std::size_t len,
                      std::optional<Clock::time_point> deadline) {
  std::size_t done = 0;
  while (done < len) {
    int wait_ms = -1;
    if (deadline) {
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
      if (left <= 0) return ReadStatus::kTimeout;
      wait_ms = static_cast<int>(std::min<long long>(left, 1000));
    } else {
      wait_ms = 200;
    }
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw SessionError(errno_text("poll"));
    }
    if (ready == 0) {
      if (!deadline) return ReadStatus::kTimeout;
      continue;
    }
    const ssize_t n = ::recv(fd, out + done, len - done, 0);
    if (n == 0) return ReadStatus::kClosed;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::kClosed;
    }
    done += static_cast<std::size_t>(n);
  }
  return ReadStatus::kOk;
}

// Reads one whole frame. A timeout before the first byte returns kTimeout;
// once a frame has started it is read to the end or the link fails.
ReadStatus read_frame(int fd, Bytes& frame, std::optional<Clock::time_point> deadline) {
  frame.assign(wire::kFrameHeaderSize, 0);
  ReadStatus st = read_exact(fd, frame.data(), 1, deadline);
  if (st != ReadStatus::kOk) return st;
  const auto rest_deadline = Clock::now() + std::chrono::seconds(30);
  st = read_exact(fd, frame.data() + 1, wire::kFrameHeaderSize - 1, rest_deadline);
  if (st != ReadStatus::kOk) return ReadStatus::kClosed;
  const wire::FrameHeader h = wire::parse_frame_header(frame);
  frame.resize(wire::kFrameHeaderSize + h.payload_len);
  st = read_exact(fd, frame.data() + wire::kFrameHeaderSize, h.payload_len, rest_deadline);
  return st == ReadStatus::kOk ? ReadStatus::kOk : ReadStatus::kClosed;
}

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) throw ConfigError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  return res;
}

class InProcessChannel : public Channel {
 public:
  InProcessChannel(std::shared_ptr<InProcessHub::State> hub, ConnectionId id,
                   std::shared_ptr<FrameQueue> inbox)
      : hub_(std::move(hub)), id_(id), inbox_(std::move(inbox)) {}

  void send(const wire::Message& m) override;
  wire::Message receive(std::chrono::milliseconds timeout) override {
    auto item = inbox_->pop(Clock::now() + timeout);
    if (!item) throw TimeoutError("no message from analyst within timeout");
    wire::Message m = wire::decode(item->second);
    ++counts_.received;
    return m;
  }

 private:
  std::shared_ptr<InProcessHub::State> hub_;
  ConnectionId id_;
  std::shared_ptr<FrameQueue> inbox_;
};

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {}
  ~TcpChannel() override { ::close(fd_); }

  void send(const wire::Message& m) override {
    write_all(fd_, wire::encode(m));
    ++counts_.sent;
  }

  wire::Message receive(std::chrono::milliseconds timeout) override {
    Bytes frame;
    const ReadStatus st = read_frame(fd_, frame, Clock::now() + timeout);
    if (st == ReadStatus::kTimeout) throw TimeoutError("no message from analyst within timeout");
    if (st == ReadStatus::kClosed) throw SessionError("analyst closed the connection");
    wire::Message m = wire::decode(frame);
    ++counts_.received;
    return m;
  }

 private:
  int fd_;
};

}  // namespace

std::chrono::milliseconds default_timeout() {
  if (const char* env = std::getenv("DCC_TIMEOUT_SECS")) {
    char* end = nullptr;
    const double secs = std::strtod(env, &end);
    if (end != env && *end == '\0' && secs > 0.0) {
      return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
    }
  }
  return std::chrono::seconds(60);
}

struct InProcessHub::State {
  FrameQueue inbound;
  std::mutex mu;
  std::map<ConnectionId, std::shared_ptr<FrameQueue>> outboxes;
  ConnectionId next = 1;
};

void InProcessChannel::send(const wire::Message& m) {
  hub_->inbound.push(id_, wire::encode(m));
  ++counts_.sent;
}

InProcessHub::InProcessHub() : state_(std::make_shared<State>()) {}

InProcessHub::~InProcessHub() {
  std::lock_guard lock(state_->mu);
  for (auto& [id, q] : state_->outboxes) q->close();
}

std::unique_ptr<Channel> InProcessHub::connect() {
  std::lock_guard lock(state_->mu);
  const ConnectionId id = state_->next++;
  auto inbox = std::make_shared<FrameQueue>();
  state_->outboxes.emplace(id, inbox);
  return std::make_unique<InProcessChannel>(state_, id, inbox);
}

std::optional<Inbound> InProcessHub::receive(Clock::time_point deadline) {
  auto item = state_->inbound.pop(deadline);
  if (!item) return std::nullopt;
  Inbound in{item->first, wire::decode(item->second)};
  ++counts_.received;
  return in;
}

void InProcessHub::send(ConnectionId to, const wire::Message& m) {
  std::shared_ptr<FrameQueue> q;
  {
    std::lock_guard lock(state_->mu);
    auto it = state_->outboxes.find(to);
    if (it == state_->outboxes.end()) {
      throw SessionError("no connection " + std::to_string(to));
    }
    q = it->second;
  }
  q->push(0, wire::encode(m));
  ++counts_.sent;
}

struct TcpAnalystEndpoint::State {
  int listen_fd = -1;
  std::uint16_t port = 0;
  std::atomic<bool> stop{false};
  FrameQueue inbound;
  std::mutex mu;
  std::map<ConnectionId, int> fds;
  std::map<ConnectionId, std::unique_ptr<std::mutex>> write_locks;
  std::vector<std::thread> readers;
  std::thread acceptor;
  ConnectionId next = 1;

  void read_loop(ConnectionId id, int fd) {
    Bytes frame;
    while (!stop.load()) {
      ReadStatus st;
      try {
        st = read_frame(fd, frame, std::nullopt);
      } catch (const Error&) {
        // Malformed header: hand the bytes to the session so it fails
        // with the decode error, then drop the connection.
        inbound.push(id, frame);
        return;
      }
      if (st == ReadStatus::kTimeout) continue;
      if (st == ReadStatus::kClosed) return;
      inbound.push(id, std::move(frame));
      frame = Bytes();
    }
  }

  void accept_loop() {
    while (!stop.load()) {
      pollfd p{listen_fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, 100);
      if (ready <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) continue;
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      std::lock_guard lock(mu);
      const ConnectionId id = next++;
      fds.emplace(id, fd);
      write_locks.emplace(id, std::make_unique<std::mutex>());
      readers.emplace_back([this, id, fd] { read_loop(id, fd); });
    }
  }
};

TcpAnalystEndpoint::TcpAnalystEndpoint(const std::string& host, std::uint16_t port)
    : state_(std::make_unique<State>()) {
  addrinfo* res = resolve(host, port, true);
  int fd = -1;
  std::string last_error = "no address";
  for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 64) == 0) break;
    last_error = errno_text("bind");
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw SessionError("cannot listen on " + host + ":" + std::to_string(port) + ": " + last_error);
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  state_->port = addr.ss_family == AF_INET6
                     ? ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port)
                     : ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  state_->listen_fd = fd;
  state_->acceptor = std::thread([s = state_.get()] { s->accept_loop(); });
}

TcpAnalystEndpoint::~TcpAnalystEndpoint() {
  state_->stop.store(true);
  if (state_->acceptor.joinable()) state_->acceptor.join();
  {
    std::lock_guard lock(state_->mu);
    for (auto& [id, fd] : state_->fds) ::shutdown(fd, SHUT_RDWR);
  }
  for (std::thread& t : state_->readers) t.join();
  for (auto& [id, fd] : state_->fds) ::close(fd);
  ::close(state_->listen_fd);
}

std::uint16_t TcpAnalystEndpoint::port() const { return state_->port; }

std::optional<Inbound> TcpAnalystEndpoint::receive(Clock::time_point deadline) {
  auto item = state_->inbound.pop(deadline);
  if (!item) return std::nullopt;
  Inbound in{item->first, wire::decode(item->second)};
  ++counts_.received;
  return in;
}

void TcpAnalystEndpoint::send(ConnectionId to, const wire::Message& m) {
  int fd = -1;
  std::mutex* lock_ptr = nullptr;
  {
    std::lock_guard lock(state_->mu);
    auto it = state_->fds.find(to);
    if (it == state_->fds.end()) throw SessionError("no connection " + std::to_string(to));
    fd = it->second;
    lock_ptr = state_->write_locks.at(to).get();
  }
  std::lock_guard write_lock(*lock_ptr);
  write_all(fd, wire::encode(m));
  ++counts_.sent;
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::string last_error = "timed out";
  while (true) {
    addrinfo* res = nullptr;
    try {
      res = resolve(host, port, false);
    } catch (const ConfigError& e) {
      last_error = e.what();
    }
    for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
      const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return std::make_unique<TcpChannel>(fd);
      }
      last_error = errno_text("connect");
      ::close(fd);
    }
    if (res != nullptr) ::freeaddrinfo(res);
    if (Clock::now() >= deadline) {
      throw TimeoutError("cannot reach analyst at " + host + ":" + std::to_string(port) + " (" +
                         last_error + ")");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ConfigError("expected host:port, got '" + text + "'");
  std::string host = text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || first == last || port > 65535) {
    throw ConfigError("bad port in '" + text + "'");
  }
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace dcc
