// Copyright 2026 The QELM Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace qelm {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(master) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
}

// Stream tags keep the per-purpose seed families apart.
namespace streams {
inline constexpr std::uint64_t kCircuit = 0x11;
inline constexpr std::uint64_t kNarma = 0x22;
inline constexpr std::uint64_t kShots = 0x33;
inline constexpr std::uint64_t kNoise = 0x44;
inline constexpr std::uint64_t kSplit = 0x55;
inline constexpr std::uint64_t kBootstrap = 0x66;
inline constexpr std::uint64_t kVariability = 0x77;
inline constexpr std::uint64_t kTrial = 0x88;
}  // namespace streams

}  // namespace qelm
