// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlink/rng.hpp"

namespace qlink {
namespace {

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label, std::uint64_t counter) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix(mix(master_seed) ^ mix(h) ^ mix(counter + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view label, std::uint64_t counter) {
    const std::uint64_t k = stream_key(master_seed, label, counter);
    std::seed_seq seq{std::uint32_t(k), std::uint32_t(k >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace qlink
