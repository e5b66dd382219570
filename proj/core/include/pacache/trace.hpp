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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pacache {

/// Dense index of a content inside its Catalog.
using ContentIndex = std::uint32_t;

inline constexpr double kSecondsPerHour = 3600.0;

struct ContentMeta {
    std::string content_id;
    double publish_time = 0.0;  // seconds since trace epoch, may be negative
    std::string type;
    std::string area;
    std::string language;
    double length = 0.0;  // seconds
    double score = 0.0;
    std::uint64_t comment_count = 0;
    std::string director;
    std::string performer;

    friend bool operator==(const ContentMeta&, const ContentMeta&) = default;
};

struct Request {
    ContentIndex content = 0;  // meta_ref into the catalog
    double timestamp = 0.0;    // seconds since trace epoch

    friend bool operator==(const Request&, const Request&) = default;
};

/// Ordered content collection with unique ids.
class Catalog {
public:
    Catalog() = default;

    /// Appends a content; throws std::invalid_argument on a duplicate id.
    ContentIndex add(ContentMeta meta);

    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
    [[nodiscard]] const ContentMeta& operator[](ContentIndex i) const { return items_.at(i); }
    [[nodiscard]] const std::vector<ContentMeta>& items() const noexcept { return items_; }

    [[nodiscard]] std::optional<ContentIndex> find(const std::string& id) const;

    /// Shifts every publish time by `-epoch`.
    void rebase(double epoch);

    friend bool operator==(const Catalog& a, const Catalog& b) { return a.items_ == b.items_; }

private:
    std::vector<ContentMeta> items_;
    std::unordered_map<std::string, ContentIndex> index_;
};

struct Trace {
    Catalog catalog;
    std::vector<Request> requests;

    [[nodiscard]] double span() const noexcept {
        return requests.empty() ? 0.0 : requests.back().timestamp - requests.front().timestamp;
    }
};

/// Parse failure carrying the 1-based line number of the offending row.
class TraceError : public std::runtime_error {
public:
    enum class Kind { Malformed, DuplicateContent, Ordering, UnknownContent, Io };

    TraceError(Kind kind, std::size_t line, const std::string& what)
        : std::runtime_error(what), kind_(kind), line_(line) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

struct TraceFormat {
    /// Largest tolerated backwards step between consecutive request timestamps.
    /// Requests within the slack are re-sorted (stable); 0 requires non-decreasing order.
    double timestamp_slack = 0.0;
    /// Re-express all times relative to the first request.
    bool rebase_to_first_request = true;
};

/// Reads the line-oriented text format:
///   C <id> <publish_time> <type> <area> <language> <length> <score> <comments> <director> <performer>
///   R <id> <timestamp>
/// Catalog rows must precede request rows. Blank lines and lines starting with '#' are skipped.
[[nodiscard]] Trace parse_trace(std::istream& in, const TraceFormat& format = {});
[[nodiscard]] Trace load_trace(const std::string& path, const TraceFormat& format = {});

/// Writes the canonical form of `trace` (shortest round-trip number formatting).
void write_trace(std::ostream& out, const Trace& trace);
void save_trace(const std::string& path, const Trace& trace);

struct SyntheticTraceConfig {
    std::size_t n_contents = 10000;
    std::size_t n_requests = 446629;
    double zipf_alpha = 0.8;
    double reshuffle_period_hours = 24.0;  // 0 = stationary popularity
    double mean_interarrival = 14.0 * 24.0 * kSecondsPerHour / 446629.0;
    std::uint64_t rng_seed = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Piecewise-stationary Zipf workload: ranks are re-permuted at every reshuffle
/// period, inter-arrival gaps are exponential, and the catalog's semantic fields are
/// drawn from fixed categorical distributions. Output is a pure function of `config`.
[[nodiscard]] Trace generate_zipf_trace(const SyntheticTraceConfig& config);

/// Splits at the half-open cutoff [0, warmup_hours * 3600).
[[nodiscard]] std::pair<std::span<const Request>, std::span<const Request>>
split_trace(std::span<const Request> requests, double warmup_hours);

}  // namespace pacache
