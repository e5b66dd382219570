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
#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "pacache/trace.hpp"

using namespace pacache;

namespace {

Trace parse(const std::string& text, TraceFormat fmt = {}) {
    std::istringstream in(text);
    return parse_trace(in, fmt);
}

TraceError parse_error(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const TraceError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return TraceError(TraceError::Kind::Io, 0, "");
}

const char* kRowA = "C A 0 movie us en 5400 8.1 12 d1 p1\n";

std::string dump(const Trace& t) {
    std::ostringstream out;
    write_trace(out, t);
    return out.str();
}

}  // namespace

TEST_CASE("minimal well-formed file") {
    const Trace t = parse(std::string(kRowA) + "R A 0.0\nR A 5.0\n");
    CHECK(t.catalog.size() == 1);
    REQUIRE(t.requests.size() == 2);
    CHECK(t.requests[1].timestamp == 5.0);
    CHECK(t.catalog[0].director == "d1");
    CHECK(t.catalog[0].comment_count == 12);
}

TEST_CASE("timestamp regression names the offending request") {
    const TraceError e = parse_error(std::string(kRowA) + "R A 5.0\nR A 1.0\n");
    CHECK(e.kind() == TraceError::Kind::Ordering);
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("request 2") != std::string::npos);
}

TEST_CASE("regression within slack is re-sorted") {
    TraceFormat fmt;
    fmt.timestamp_slack = 2.0;
    const Trace t = parse(std::string(kRowA) + "R A 5.0\nR A 4.0\nR A 6.0\n", fmt);
    REQUIRE(t.requests.size() == 3);
    CHECK(std::is_sorted(t.requests.begin(), t.requests.end(),
                         [](const Request& a, const Request& b) { return a.timestamp < b.timestamp; }));
    CHECK(t.requests.front().timestamp == 0.0);
}

TEST_CASE("unknown id in a request row") {
    const TraceError e = parse_error(std::string(kRowA) + "R Z 1.0\n");
    CHECK(e.kind() == TraceError::Kind::UnknownContent);
    CHECK(std::string(e.what()).find("'Z'") != std::string::npos);
}

TEST_CASE("duplicate catalog row") {
    CHECK(parse_error(std::string(kRowA) + kRowA).kind() == TraceError::Kind::DuplicateContent);
}

TEST_CASE("malformed rows report their line") {
    const TraceError short_row = parse_error("# header\nC A 0 movie\n");
    CHECK(short_row.kind() == TraceError::Kind::Malformed);
    CHECK(short_row.line() == 2);
    CHECK(parse_error(std::string(kRowA) + "R A abc\n").kind() == TraceError::Kind::Malformed);
    CHECK(parse_error(std::string(kRowA) + "X A 1\n").kind() == TraceError::Kind::Malformed);
    CHECK(parse_error(std::string(kRowA) + "R A 1\n" + kRowA).kind() == TraceError::Kind::Malformed);
}

TEST_CASE("missing file names the path") {
    try {
        (void)load_trace("/nonexistent/dir/trace.txt");
        FAIL("expected failure");
    } catch (const TraceError& e) {
        CHECK(e.kind() == TraceError::Kind::Io);
        CHECK(std::string(e.what()).find("/nonexistent/dir/trace.txt") != std::string::npos);
    }
}

TEST_CASE("times are rebased to the first request") {
    const Trace t = parse("C A 50 movie us en 5400 8.1 12 d1 p1\nR A 100\nR A 160\n");
    CHECK(t.requests[0].timestamp == 0.0);
    CHECK(t.requests[1].timestamp == 60.0);
    CHECK(t.catalog[0].publish_time == -50.0);
}

TEST_CASE("write then parse is a fixed point") {
    SyntheticTraceConfig cfg;
    cfg.n_contents = 50;
    cfg.n_requests = 500;
    const Trace t = generate_zipf_trace(cfg);
    const std::string once = dump(t);
    const Trace back = parse(once);
    CHECK(back.catalog == t.catalog);
    CHECK(back.requests == t.requests);
    CHECK(dump(back) == once);
}

TEST_CASE("steep exponent concentrates on the top content") {
    SyntheticTraceConfig cfg;
    cfg.n_contents = 10;
    cfg.n_requests = 1000;
    cfg.zipf_alpha = 20.0;
    cfg.reshuffle_period_hours = 0.0;
    const Trace t = generate_zipf_trace(cfg);
    std::map<ContentIndex, std::size_t> counts;
    for (const auto& r : t.requests) ++counts[r.content];
    std::size_t top = 0;
    for (const auto& [c, n] : counts) top = std::max(top, n);

    double z = 0.0;
    for (int i = 1; i <= 10; ++i) z += std::pow(i, -20.0);
    const double p1 = 1.0 / z;
    const double k = 1000.0;
    const double lower = k * p1 - 3.0 * std::sqrt(k * p1 * (1.0 - p1));
    CHECK(static_cast<double>(top) >= lower);
    CHECK(static_cast<double>(top) / k >= 0.99);
}

TEST_CASE("same seed gives byte-identical traces") {
    SyntheticTraceConfig cfg;
    cfg.n_contents = 200;
    cfg.n_requests = 3000;
    cfg.rng_seed = 7;
    CHECK(dump(generate_zipf_trace(cfg)) == dump(generate_zipf_trace(cfg)));
    cfg.rng_seed = 8;
    const std::string other = dump(generate_zipf_trace(cfg));
    cfg.rng_seed = 7;
    CHECK(dump(generate_zipf_trace(cfg)) != other);
}

TEST_CASE("rank-frequency slope over the top ranks") {
    SyntheticTraceConfig cfg;
    cfg.reshuffle_period_hours = 0.0;
    const Trace t = generate_zipf_trace(cfg);
    std::vector<double> counts(cfg.n_contents, 0.0);
    for (const auto& r : t.requests) counts[r.content] += 1.0;
    std::sort(counts.begin(), counts.end(), std::greater<>());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(i + 1.0), y = std::log(counts[static_cast<std::size_t>(i)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= -0.9);
    CHECK(slope <= -0.7);
}

TEST_CASE("generated traces satisfy the request invariants") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        SyntheticTraceConfig cfg;
        cfg.n_contents = 1 + seed * 37;
        cfg.n_requests = 2000;
        cfg.zipf_alpha = 0.3 + 0.1 * static_cast<double>(seed);
        cfg.reshuffle_period_hours = static_cast<double>(seed % 3);
        cfg.mean_interarrival = 5.0;
        cfg.rng_seed = seed;
        const Trace t = generate_zipf_trace(cfg);
        REQUIRE(t.requests.size() == cfg.n_requests);
        CHECK(t.requests.front().timestamp == 0.0);
        std::vector<double> first(t.catalog.size(), INFINITY);
        for (std::size_t k = 0; k < t.requests.size(); ++k) {
            const auto& r = t.requests[k];
            REQUIRE(r.content < t.catalog.size());
            if (k) REQUIRE(r.timestamp >= t.requests[k - 1].timestamp);
            first[r.content] = std::min(first[r.content], r.timestamp);
        }
        for (ContentIndex c = 0; c < t.catalog.size(); ++c) CHECK(t.catalog[c].publish_time <= first[c]);
    }
}

TEST_CASE("invalid generator settings name the field") {
    SyntheticTraceConfig cfg;
    cfg.zipf_alpha = 0.0;
    try {
        cfg.validate();
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("zipf_alpha") != std::string::npos);
    }
    cfg.zipf_alpha = 1.0;
    cfg.n_requests = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("warm-up split is half-open") {
    const std::vector<Request> req{{0, 0.0}, {0, 3599.0}, {0, 3600.0}};
    auto [warm, test] = split_trace(req, 1.0);
    CHECK(warm.size() == 2);
    CHECK(test.size() == 1);
    std::tie(warm, test) = split_trace(req, 0.0);
    CHECK(warm.empty());
    CHECK(test.size() == 3);
    std::tie(warm, test) = split_trace(req, 10.0);
    CHECK(warm.size() == 3);
    CHECK(test.empty());
}
