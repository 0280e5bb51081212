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

#include "dcc/wire.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <json.hpp>
#include <limits>
#include <set>

#include "dcc/errors.hpp"

namespace dcc::wire {

namespace {

using nlohmann::json;

constexpr std::uint8_t kMagic[4] = {'D', 'C', 'C', '1'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const T le = to_little(v);
  const auto* p = reinterpret_cast<const std::uint8_t*>(&le);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t at) {
  T v;
  std::memcpy(&v, in.data() + at, sizeof(T));
  return to_little(v);
}

json party_json(PartyId p) { return json::array({p.row, p.col}); }

json shape(const char* name, const Matrix& m) {
  return json{{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}};
}

void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put(out, m(i, j));
  }
}

// Reads the JSON header and matrices of one payload.
class PayloadReader {
 public:
  PayloadReader(std::span<const std::uint8_t> frame, std::size_t start)
      : frame_(frame), at_(start) {}

  json header(Kind kind) {
    need(4, "header length");
    const std::uint32_t len = get<std::uint32_t>(frame_, at_);
    at_ += 4;
    need(len, "JSON header");
    const std::size_t json_at = at_;
    const auto* first = reinterpret_cast<const char*>(frame_.data() + at_);
    json h;
    try {
      h = json::parse(first, first + len);
    } catch (const json::parse_error& e) {
      throw DecodeError(std::string("malformed JSON header: ") + e.what(),
                        json_at + (e.byte > 0 ? e.byte - 1 : 0));
    }
    at_ += len;
    if (!h.is_object()) throw DecodeError("JSON header is not an object", json_at);
    const auto& allowed = header_keys(kind);
    const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
    for (const auto& [key, value] : h.items()) {
      if (!allowed_set.count(key)) throw DecodeError("unexpected header key '" + key + "'", json_at);
    }
    for (const auto& key : allowed) {
      if (!h.contains(key)) throw DecodeError("missing header key '" + key + "'", json_at);
    }
    json_at_ = json_at;
    return h;
  }

  std::vector<Matrix> matrices(const json& list, const std::vector<std::string>& names) {
    if (!list.is_array() || list.size() != names.size()) {
      throw DecodeError("expected " + std::to_string(names.size()) + " matrices", json_at_);
    }
    std::vector<std::pair<Index, Index>> shapes;
    for (std::size_t t = 0; t < names.size(); ++t) {
      const json& m = list[t];
      if (!m.is_object() || m.size() != 3 || !m.contains("name") || !m.contains("rows") ||
          !m.contains("cols")) {
        throw DecodeError("matrix descriptor must have exactly name, rows, cols", json_at_);
      }
      if (m["name"] != names[t]) {
        throw DecodeError("matrix " + std::to_string(t) + " must be '" + names[t] + "'", json_at_);
      }
      shapes.emplace_back(count(m["rows"], "rows"), count(m["cols"], "cols"));
    }
    std::vector<Matrix> out;
    for (auto [rows, cols] : shapes) {
      const auto cells = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
      if (rows != 0 && cells / static_cast<std::uint64_t>(rows) != static_cast<std::uint64_t>(cols)) {
        throw DecodeError("matrix shape overflows", json_at_);
      }
      if (cells > (frame_.size() - at_) / sizeof(double)) {
        throw DecodeError("truncated matrix data", frame_.size());
      }
      Matrix m(rows, cols);
      for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
          m(i, j) = get<double>(frame_, at_);
          at_ += sizeof(double);
        }
      }
      out.push_back(std::move(m));
    }
    return out;
  }

  void finish() const {
    if (at_ != frame_.size()) {
      throw DecodeError(std::to_string(frame_.size() - at_) + " trailing bytes after payload", at_);
    }
  }

  PartyId party(const json& v) const {
    if (!v.is_array() || v.size() != 2) throw DecodeError("party must be [row, col]", json_at_);
    return PartyId{integer(v[0], "party row"), integer(v[1], "party col")};
  }

  int integer(const json& v, const char* what, long long min = 0) const {
    if (!v.is_number_integer()) {
      throw DecodeError(std::string(what) + " must be an integer", json_at_);
    }
    const long long x = v.get<long long>();
    if (x < min || x > std::numeric_limits<int>::max()) {
      throw DecodeError(std::string(what) + " out of range", json_at_);
    }
    return static_cast<int>(x);
  }

  Index count(const json& v, const char* what) const {
    if (!v.is_number_integer()) throw DecodeError(std::string(what) + " must be an integer", json_at_);
    const long long x = v.get<long long>();
    if (x < 0 || x > (std::int64_t{1} << 40)) {
      throw DecodeError(std::string(what) + " out of range", json_at_);
    }
    return static_cast<Index>(x);
  }

  std::string text(const json& v, const char* what) const {
    if (!v.is_string()) throw DecodeError(std::string(what) + " must be a string", json_at_);
    return v.get<std::string>();
  }

  std::size_t json_at() const { return json_at_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (frame_.size() - at_ < n) throw DecodeError(std::string("truncated ") + what, frame_.size());
  }

  std::span<const std::uint8_t> frame_;
  std::size_t at_;
  std::size_t json_at_ = 0;
};

}  // namespace

Kind kind_of(const Message& m) {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ShareMessage>) return Kind::kShare;
        if constexpr (std::is_same_v<T, ResultMessage>) return Kind::kResult;
        return Kind::kAbort;
      },
      m);
}

const std::vector<std::string>& header_keys(Kind kind) {
  static const std::vector<std::string> share = {"party", "matrices"};
  static const std::vector<std::string> result = {"party", "row",  "k",       "algorithm",
                                                  "mode",  "m_hat", "matrices"};
  static const std::vector<std::string> abort = {"reason"};
  switch (kind) {
    case Kind::kShare:
      return share;
    case Kind::kResult:
      return result;
    case Kind::kAbort:
      return abort;
  }
  return abort;
}

std::vector<std::uint8_t> encode(const Message& m) {
  json header;
  std::vector<const Matrix*> mats;
  if (const auto* s = std::get_if<ShareMessage>(&m)) {
    header["party"] = party_json(s->share.party);
    header["matrices"] = json::array(
        {shape("x_tilde", s->share.x_tilde), shape("anchor_tilde", s->share.anchor_tilde)});
    mats = {&s->share.x_tilde, &s->share.anchor_tilde};
  } else if (const auto* r = std::get_if<ResultMessage>(&m)) {
    header["party"] = party_json(r->party);
    header["row"] = r->result.row;
    header["k"] = r->k;
    header["algorithm"] = to_string(r->result.algorithm);
    header["mode"] = to_string(r->mode);
    header["m_hat"] = r->m_hat;
    header["matrices"] = json::array(
        {shape("centroids", r->result.centroids), shape("z_block", r->result.z_block)});
    mats = {&r->result.centroids, &r->result.z_block};
  } else {
    header["reason"] = std::get<AbortMessage>(m).reason;
  }
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(static_cast<std::uint8_t>(kind_of(m)));
  put<std::uint64_t>(out, 0);  // patched below
  put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const Matrix* mat : mats) put_matrix(out, *mat);
  const std::uint64_t payload = out.size() - kFrameHeaderSize;
  const std::uint64_t le = to_little(payload);
  std::memcpy(out.data() + 5, &le, sizeof(le));
  return out;
}

FrameHeader parse_frame_header(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) throw DecodeError("truncated magic", bytes.size());
    if (bytes[i] != kMagic[i]) throw DecodeError("bad magic", i);
  }
  if (bytes.size() < 5) throw DecodeError("truncated kind", bytes.size());
  const std::uint8_t kind = bytes[4];
  if (kind < 1 || kind > 3) throw DecodeError("unknown message kind " + std::to_string(kind), 4);
  if (bytes.size() < kFrameHeaderSize) throw DecodeError("truncated length", bytes.size());
  const auto len = get<std::uint64_t>(bytes, 5);
  if (len > kMaxPayload) throw DecodeError("payload length " + std::to_string(len) + " too large", 5);
  return FrameHeader{static_cast<Kind>(kind), len};
}

Message decode(std::span<const std::uint8_t> frame) {
  const FrameHeader fh = parse_frame_header(frame);
  if (frame.size() - kFrameHeaderSize < fh.payload_len) {
    throw DecodeError("truncated payload: declared " + std::to_string(fh.payload_len) + " bytes",
                      frame.size());
  }
  if (frame.size() - kFrameHeaderSize > fh.payload_len) {
    throw DecodeError("bytes after declared payload", kFrameHeaderSize + fh.payload_len);
  }
  PayloadReader reader(frame, kFrameHeaderSize);
  const json h = reader.header(fh.kind);
  switch (fh.kind) {
    case Kind::kShare: {
      ShareMessage s;
      s.share.party = reader.party(h["party"]);
      auto mats = reader.matrices(h["matrices"], {"x_tilde", "anchor_tilde"});
      reader.finish();
      s.share.x_tilde = std::move(mats[0]);
      s.share.anchor_tilde = std::move(mats[1]);
      return s;
    }
    case Kind::kResult: {
      ResultMessage r;
      r.party = reader.party(h["party"]);
      r.result.row = reader.integer(h["row"], "row");
      r.k = reader.integer(h["k"], "k", 1);
      r.m_hat = reader.count(h["m_hat"], "m_hat");
      try {
        r.result.algorithm = parse_algorithm(reader.text(h["algorithm"], "algorithm"));
        r.mode = parse_mode(reader.text(h["mode"], "mode"));
      } catch (const ConfigError& e) {
        throw DecodeError(e.what(), reader.json_at());
      }
      auto mats = reader.matrices(h["matrices"], {"centroids", "z_block"});
      reader.finish();
      r.result.centroids = std::move(mats[0]);
      r.result.z_block = std::move(mats[1]);
      return r;
    }
    case Kind::kAbort: {
      AbortMessage a;
      a.reason = reader.text(h["reason"], "reason");
      reader.finish();
      return a;
    }
  }
  throw DecodeError("unknown message kind", 4);
}

}  // namespace dcc::wire
