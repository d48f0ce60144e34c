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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qlink {

// Streams are addressed by (master seed, purpose label, counter); each address
// maps through a 64-bit mixer to an independent engine seed, so new purposes
// never shift the draws of existing ones.
std::uint64_t stream_key(std::uint64_t master_seed, std::string_view label, std::uint64_t counter = 0);
std::mt19937_64 make_stream(std::uint64_t master_seed, std::string_view label, std::uint64_t counter = 0);

}  // namespace qlink
