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

#include <memory>
#include <vector>

#include "doctest.h"
#include "pacache/policies.hpp"
#include "pacache/predictors.hpp"
#include "pacache/random.hpp"
#include "pacache/verify/oracles.hpp"

using namespace pacache;

namespace {

constexpr ContentIndex A = 0, B = 1, C = 2, D = 3;

PolicyDecision miss(std::optional<ContentIndex> victim = std::nullopt) { return {false, victim}; }
PolicyDecision hit() { return {true, std::nullopt}; }

std::size_t hits(const std::vector<PolicyDecision>& ds) {
    std::size_t n = 0;
    for (const auto& d : ds) n += d.hit;
    return n;
}

std::vector<ContentIndex> zipf_ids(std::size_t n, std::size_t contents, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w(contents);
    for (std::size_t i = 0; i < contents; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), 0.8);
    std::discrete_distribution<ContentIndex> dist(w.begin(), w.end());
    std::vector<ContentIndex> out(n);
    for (auto& c : out) c = dist(rng);
    return out;
}

}  // namespace

TEST_CASE("lru worked example") {
    LruPolicy p(2);
    const std::vector<ContentIndex> t{A, B, A, C, B};
    const auto ds = verify::replay(p, t);
    CHECK(ds == std::vector<PolicyDecision>{miss(), miss(), hit(), miss(B), miss(A)});
    CHECK(hits(ds) == 1);
}

TEST_CASE("lru single content and ample capacity") {
    LruPolicy p(3);
    const std::vector<ContentIndex> one{A, A, A, A};
    CHECK(hits(verify::replay(p, one)) == 3);
    LruPolicy q(4);
    const std::vector<ContentIndex> t{A, B, C, A, D, B, C, D, A};
    const auto ds = verify::replay(q, t);
    CHECK(hits(ds) == t.size() - 4);
    for (const auto& d : ds) CHECK_FALSE(d.victim);
}

TEST_CASE("lfu worked example") {
    LfuPolicy p(2);
    const std::vector<ContentIndex> t{A, A, B, C};
    const auto ds = verify::replay(p, t);
    CHECK(ds == std::vector<PolicyDecision>{miss(), hit(), miss(), miss(B)});
    CHECK(p.frequency(A) == 2);
}

TEST_CASE("lfu ties fall back to recency") {
    LfuPolicy p(3);
    const std::vector<ContentIndex> t{A, B, C, D};
    const auto ds = verify::replay(p, t);
    CHECK(ds.back() == miss(A));
}

TEST_CASE("lfu forgets evicted counts") {
    LfuPolicy p(1);
    const std::vector<ContentIndex> t{A, A, A, B, A};
    (void)verify::replay(p, t);
    CHECK(p.frequency(A) == 1);
}

TEST_CASE("lru and lfu match the list-scan references") {
    const auto t = zipf_ids(20000, 300, 4);
    for (std::size_t s : {1u, 7u, 50u}) {
        LruPolicy lru(s);
        CHECK(verify::replay(lru, t) == verify::reference_lru(t, s));
        LfuPolicy lfu(s);
        CHECK(verify::replay(lfu, t) == verify::reference_lfu(t, s));
    }
}

TEST_CASE("lecar with pinned weights degenerates") {
    const auto t = zipf_ids(5000, 200, 9);
    LecarPolicy as_lru(20, LecarOptions{.initial_lru_weight = 1.0, .pinned = true, .seed = 3});
    CHECK(verify::replay(as_lru, t) == verify::reference_lru(t, 20));
    LecarPolicy as_lfu(20, LecarOptions{.initial_lru_weight = 0.0, .pinned = true, .seed = 3});
    CHECK(verify::replay(as_lfu, t) == verify::reference_lfu(t, 20));
}

TEST_CASE("lecar ghost hit penalises the evicting expert") {
    // after A,A,B the recency expert would evict A and the frequency expert B
    LecarPolicy p(2, LecarOptions{.initial_lru_weight = 0.99, .seed = 1});
    const std::vector<ContentIndex> t{A, A, B, C};
    const auto ds = verify::replay(p, t);
    REQUIRE(ds.back() == miss(A));
    (void)p.on_request(A, 4.0);
    CHECK(p.lru_weight() < 0.99);
    CHECK(p.lru_weight() + p.lfu_weight() == doctest::Approx(1.0));
}

TEST_CASE("lecar default discount") {
    LecarPolicy p(100, LecarOptions{});
    CHECK(p.discount() == doctest::Approx(std::pow(0.005, 1.0 / 100.0)));
}

TEST_CASE("belady worked example") {
    const std::vector<ContentIndex> ids{A, B, C, A, B, D, A};
    const Trace t = verify::make_trace(ids, 4, 1.0);
    BeladyPolicy p(2, std::make_shared<const NextUseIndex>(belady_build(t.requests)));
    std::vector<PolicyDecision> ds;
    for (const Request& r : t.requests) ds.push_back(p.on_request(r.content, r.timestamp));
    CHECK(ds == std::vector<PolicyDecision>{miss(), miss(), miss(B), hit(), miss(C), miss(B), hit()});
    CHECK(hits(ds) == verify::exhaustive_max_hits(ids, 2));
}

TEST_CASE("belady with ample capacity has cold misses only") {
    const auto ids = zipf_ids(400, 30, 2);
    const Trace t = verify::make_trace(ids, 30, 1.0);
    BeladyPolicy p(30, std::make_shared<const NextUseIndex>(belady_build(t.requests)));
    std::size_t n = 0;
    for (const Request& r : t.requests) n += p.on_request(r.content, r.timestamp).hit;
    std::vector<bool> seen(30);
    std::size_t distinct = 0;
    for (auto c : ids) distinct += !seen[c], seen[c] = true;
    CHECK(n == ids.size() - distinct);
}

TEST_CASE("belady rejects an out-of-order request") {
    const std::vector<ContentIndex> ids{A, B, C};
    const Trace t = verify::make_trace(ids, 3, 1.0);
    BeladyPolicy p(2, std::make_shared<const NextUseIndex>(belady_build(t.requests)));
    CHECK_THROWS_AS((void)p.on_request(B, 0.0), BeladyIndexError);
}

TEST_CASE("pa evicts the least popular") {
    TablePredictor est(4);
    est.set(A, 5.0);
    est.set(B, 1.0);
    est.set(C, 3.0);
    PaPolicy p(2, est);
    CHECK(p.on_request(A, 0) == miss());
    CHECK(p.on_request(B, 1) == miss());
    CHECK(p.on_request(C, 2) == miss(B));
    CHECK(p.contains(A));
    CHECK(p.contains(C));
    CHECK(p.head() == C);
}

TEST_CASE("pa with equal estimates behaves like lru") {
    TablePredictor est(300);
    for (ContentIndex c = 0; c < 300; ++c) est.set(c, 2.0);
    const auto t = zipf_ids(10000, 300, 6);
    PaPolicy p(25, est);
    CHECK(verify::replay(p, t) == verify::reference_lru(t, 25));
}

TEST_CASE("pa unknown contents score zero without a side space") {
    TablePredictor est(3);
    est.set(A, 1.0);
    PaPolicy p(2, est);
    (void)p.on_request(A, 0);
    (void)p.on_request(B, 1);
    CHECK(p.side_capacity() == 0);
    CHECK(p.queued_estimate(B) == 0.0);
    CHECK(p.on_request(C, 2) == miss(B));
}

TEST_CASE("pa rescoring at a window boundary") {
    TablePredictor est(3);
    est.set(A, 1.0);
    est.set(B, 2.0);
    est.set(C, 0.5);
    PaPolicy p(2, est);
    (void)p.on_request(A, 0);
    (void)p.on_request(B, 1);
    est.set(A, 9.0);
    CHECK(p.head() == A);
    p.notify_window(1);
    CHECK(p.head() == B);
    CHECK(p.on_request(C, 2) == miss(B));
}

TEST_CASE("pa oracle ranking follows true popularity") {
    // content c is requested c + 1 times per round; the oracle scores the whole trace as one window
    std::vector<ContentIndex> ids;
    for (int r = 0; r < 5; ++r)
        for (ContentIndex c = 0; c < 6; ++c)
            for (ContentIndex k = 0; k <= c; ++k) ids.push_back(c);
    const Trace t = verify::make_trace(ids, 6, 1.0);
    OraclePredictor oracle(t.requests, 6, 1e6);
    oracle.refresh(0);
    PaPolicy p(6, oracle);
    for (const Request& r : t.requests) (void)p.on_request(r.content, r.timestamp);
    CHECK(p.head() == A);
    for (ContentIndex c = 0; c < 6; ++c) CHECK(*p.queued_estimate(c) == 5.0 * static_cast<double>(c + 1));

    // evictions then go in ascending popularity
    TablePredictor fresh(20);
    for (ContentIndex c = 0; c < 6; ++c) fresh.set(c, 5.0 * static_cast<double>(c + 1));
    for (ContentIndex c = 6; c < 20; ++c) fresh.set(c, 100.0);
    PaPolicy q(6, fresh);
    for (ContentIndex c = 0; c < 6; ++c) (void)q.on_request(5 - c, c);
    for (ContentIndex c = 0; c < 6; ++c) CHECK(q.on_request(6 + c, 10 + c) == miss(c));
}

TEST_CASE("pa side space isolates new contents") {
    TablePredictor est(100);
    for (ContentIndex c = 0; c < 4; ++c) est.set(c, 10.0 + c);
    PaPolicy p(5, est, PaOptions{.cold_start_fraction = 0.2});
    CHECK(p.side_capacity() == 1);
    for (ContentIndex c = 0; c < 4; ++c) (void)p.on_request(c, c);
    for (ContentIndex c = 10; c < 60; ++c) {
        const PolicyDecision d = p.on_request(c, c);
        if (d.victim) CHECK(*d.victim >= 10);
        CHECK(p.side_size() <= 1);
    }
    for (ContentIndex c = 0; c < 4; ++c) CHECK(p.contains(c));
}

TEST_CASE("pa side space promotes scored contents") {
    TablePredictor est(10);
    est.set(A, 1.0);
    PaPolicy p(4, est, PaOptions{.cold_start_fraction = 0.5});
    (void)p.on_request(A, 0);
    (void)p.on_request(B, 1);
    CHECK(p.in_side_space(B));
    est.set(B, 4.0);
    p.notify_window(1);
    CHECK_FALSE(p.in_side_space(B));
    CHECK(p.queued_estimate(B) == 4.0);
    CHECK(p.side_size() == 0);
}

TEST_CASE("pa rejects a full side space fraction") {
    TablePredictor est(1);
    CHECK_THROWS_AS(PaPolicy(4, est, PaOptions{.cold_start_fraction = 1.0}), std::invalid_argument);
}
