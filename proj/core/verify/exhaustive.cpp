// Copyright 2026 The pacache Authors
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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "pacache/verify/oracles.hpp"

namespace pacache::verify {

namespace {

struct Search {
    std::span<const ContentIndex> requests;
    std::size_t capacity;
    bool memoize;
    std::unordered_map<std::uint64_t, std::size_t> memo;

    std::size_t best(std::size_t pos, std::uint32_t cached) {
        if (pos == requests.size()) return 0;
        const std::uint64_t key = (static_cast<std::uint64_t>(pos) << 32) | cached;
        if (memoize) {
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
        }
        const std::uint32_t bit = 1u << requests[pos];
        std::size_t result = 0;
        if (cached & bit) {
            result = 1 + best(pos + 1, cached);
        } else if (static_cast<std::size_t>(std::popcount(cached)) < capacity) {
            result = best(pos + 1, cached | bit);
        } else {
            for (std::uint32_t rest = cached; rest; rest &= rest - 1) {
                const std::uint32_t victim = rest & (~rest + 1);
                result = std::max(result, best(pos + 1, (cached & ~victim) | bit));
            }
        }
        if (memoize) memo.emplace(key, result);
        return result;
    }
};

std::size_t search(std::span<const ContentIndex> requests, std::size_t capacity, bool memoize) {
    if (capacity == 0) throw std::invalid_argument("capacity must be at least 1");
    for (ContentIndex c : requests) {
        if (c >= 32) throw std::invalid_argument("exhaustive search supports content ids below 32");
    }
    Search s{requests, capacity, memoize, {}};
    return s.best(0, 0);
}

}  // namespace

std::size_t exhaustive_max_hits(std::span<const ContentIndex> requests, std::size_t capacity) {
    return search(requests, capacity, true);
}

std::size_t brute_force_max_hits(std::span<const ContentIndex> requests, std::size_t capacity) {
    return search(requests, capacity, false);
}

}  // namespace pacache::verify
