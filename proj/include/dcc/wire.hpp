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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcc/collaboration.hpp"

// Frame layout, all integers little-endian:
//
//   "DCC1" | kind:u8 | payload_len:u64 | payload
//   payload = header_len:u32 | JSON header | matrices
//
// The JSON header names the sender/addressee and the shape of every matrix;
// matrices follow in header order as row-major float64.
namespace dcc::wire {

enum class Kind : std::uint8_t { kShare = 1, kResult = 2, kAbort = 3 };

inline constexpr std::size_t kFrameHeaderSize = 13;
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 34;

// User -> analyst. Built only from a UserShare, so the map f can never
// travel.
struct ShareMessage {
  UserShare share;
};

// Analyst -> one user. `party` is the addressee.
struct ResultMessage {
  PartyId party;
  int k = 0;
  GMode mode = GMode::kAffine;
  Index m_hat = 0;
  AnalystResult result;
};

// Analyst -> user when the session cannot complete.
struct AbortMessage {
  std::string reason;
};

using Message = std::variant<ShareMessage, ResultMessage, AbortMessage>;

Kind kind_of(const Message& m);

std::vector<std::uint8_t> encode(const Message& m);

// Decodes exactly one complete frame. Throws DecodeError with the byte
// offset of the first problem.
Message decode(std::span<const std::uint8_t> frame);

struct FrameHeader {
  Kind kind;
  std::uint64_t payload_len;
};

// Validates magic, kind and length of the first kFrameHeaderSize bytes.
FrameHeader parse_frame_header(std::span<const std::uint8_t> bytes);

// The JSON keys a frame of this kind may carry, in canonical order.
const std::vector<std::string>& header_keys(Kind kind);

}  // namespace dcc::wire
