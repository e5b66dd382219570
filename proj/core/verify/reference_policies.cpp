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

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacache/verify/oracles.hpp"

namespace pacache::verify {

namespace {

struct Slot {
    ContentIndex id;
    std::size_t count;
    std::size_t stamp;
};

template <class Worse>
std::vector<PolicyDecision> scan(std::span<const ContentIndex> requests, std::size_t capacity, Worse worse) {
    std::vector<Slot> cache;
    std::vector<PolicyDecision> out;
    out.reserve(requests.size());
    for (std::size_t k = 0; k < requests.size(); ++k) {
        const ContentIndex c = requests[k];
        auto it = std::find_if(cache.begin(), cache.end(), [c](const Slot& s) { return s.id == c; });
        if (it != cache.end()) {
            ++it->count;
            it->stamp = k;
            out.push_back({true, std::nullopt});
            continue;
        }
        PolicyDecision d;
        if (cache.size() >= capacity) {
            std::size_t v = 0;
            for (std::size_t i = 1; i < cache.size(); ++i) {
                if (worse(cache[i], cache[v])) v = i;
            }
            d.victim = cache[v].id;
            cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(v));
        }
        cache.push_back({c, 1, k});
        out.push_back(d);
    }
    return out;
}

}  // namespace

Trace make_trace(std::span<const ContentIndex> requests, std::size_t n_contents, double spacing) {
    Trace t;
    for (std::size_t i = 0; i < n_contents; ++i) {
        ContentMeta m;
        m.content_id = "k" + std::to_string(i);
        m.type = "t" + std::to_string(i % 3);
        m.area = "a" + std::to_string(i % 2);
        m.language = "l0";
        m.length = 600.0 + 60.0 * static_cast<double>(i);
        m.score = static_cast<double>(i % 10);
        m.comment_count = i * 7;
        m.director = "d" + std::to_string(i % 5);
        m.performer = "p" + std::to_string(i);
        t.catalog.add(std::move(m));
    }
    t.requests.reserve(requests.size());
    for (std::size_t k = 0; k < requests.size(); ++k) {
        if (requests[k] >= n_contents) throw std::invalid_argument("request outside the catalog");
        t.requests.push_back({requests[k], spacing * static_cast<double>(k)});
    }
    return t;
}

std::vector<PolicyDecision> reference_lru(std::span<const ContentIndex> requests, std::size_t capacity) {
    return scan(requests, capacity, [](const Slot& a, const Slot& b) { return a.stamp < b.stamp; });
}

std::vector<PolicyDecision> reference_lfu(std::span<const ContentIndex> requests, std::size_t capacity) {
    return scan(requests, capacity, [](const Slot& a, const Slot& b) {
        return a.count != b.count ? a.count < b.count : a.stamp < b.stamp;
    });
}

std::vector<PolicyDecision> replay(CachePolicy& policy, std::span<const ContentIndex> requests) {
    std::vector<PolicyDecision> out;
    out.reserve(requests.size());
    for (std::size_t k = 0; k < requests.size(); ++k) out.push_back(policy.on_request(requests[k], static_cast<double>(k)));
    return out;
}

}  // namespace pacache::verify
