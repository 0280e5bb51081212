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

#include <cstdint>
#include <random>
#include <string_view>

namespace dcc {

using Rng = std::mt19937_64;

// Stable 64-bit mix of a parent seed and a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

// Same, keyed by a short name instead of an index.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream);

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

}  // namespace dcc
