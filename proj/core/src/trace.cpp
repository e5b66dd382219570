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

#include "pacache/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pacache/csv.hpp"
#include "pacache/random.hpp"

namespace pacache {

ContentIndex Catalog::add(ContentMeta meta) {
    const auto idx = static_cast<ContentIndex>(items_.size());
    auto [it, inserted] = index_.emplace(meta.content_id, idx);
    if (!inserted) throw std::invalid_argument("duplicate content id: " + meta.content_id);
    items_.push_back(std::move(meta));
    return idx;
}

std::optional<ContentIndex> Catalog::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Catalog::rebase(double epoch) {
    for (auto& m : items_) m.publish_time -= epoch;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* field) {
    T value{};
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw TraceError(TraceError::Kind::Malformed, line,
                         "line " + std::to_string(line) + ": bad " + field + " '" + std::string(tok) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw TraceError(TraceError::Kind::Malformed, line,
                             "line " + std::to_string(line) + ": non-finite " + field);
        }
    }
    return value;
}

}  // namespace

Trace parse_trace(std::istream& in, const TraceFormat& format) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    std::size_t request_ordinal = 0;
    bool in_body = false;
    bool needs_sort = false;
    double last_ts = -std::numeric_limits<double>::infinity();

    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = tokenize(line);
        if (toks.empty() || toks[0].front() == '#') continue;

        if (toks[0] == "C") {
            if (in_body) {
                throw TraceError(TraceError::Kind::Malformed, lineno,
                                 "line " + std::to_string(lineno) + ": catalog row after request rows");
            }
            if (toks.size() != 11) {
                throw TraceError(TraceError::Kind::Malformed, lineno,
                                 "line " + std::to_string(lineno) + ": catalog row needs 11 fields, got " +
                                     std::to_string(toks.size()));
            }
            ContentMeta meta;
            meta.content_id = std::string(toks[1]);
            meta.publish_time = parse_number<double>(toks[2], lineno, "publish_time");
            meta.type = std::string(toks[3]);
            meta.area = std::string(toks[4]);
            meta.language = std::string(toks[5]);
            meta.length = parse_number<double>(toks[6], lineno, "length");
            meta.score = parse_number<double>(toks[7], lineno, "score");
            meta.comment_count = parse_number<std::uint64_t>(toks[8], lineno, "comment_count");
            meta.director = std::string(toks[9]);
            meta.performer = std::string(toks[10]);
            if (meta.length < 0) {
                throw TraceError(TraceError::Kind::Malformed, lineno,
                                 "line " + std::to_string(lineno) + ": negative length");
            }
            if (trace.catalog.find(meta.content_id)) {
                throw TraceError(TraceError::Kind::DuplicateContent, lineno,
                                 "line " + std::to_string(lineno) + ": duplicate content id '" +
                                     meta.content_id + "'");
            }
            trace.catalog.add(std::move(meta));
        } else if (toks[0] == "R") {
            in_body = true;
            ++request_ordinal;
            if (toks.size() != 3) {
                throw TraceError(TraceError::Kind::Malformed, lineno,
                                 "line " + std::to_string(lineno) + ": request row needs 3 fields");
            }
            const auto idx = trace.catalog.find(std::string(toks[1]));
            if (!idx) {
                throw TraceError(TraceError::Kind::UnknownContent, lineno,
                                 "line " + std::to_string(lineno) + ": unknown content id '" +
                                     std::string(toks[1]) + "'");
            }
            const double ts = parse_number<double>(toks[2], lineno, "timestamp");
            if (ts < last_ts) {
                if (last_ts - ts > format.timestamp_slack) {
                    throw TraceError(TraceError::Kind::Ordering, lineno,
                                     "line " + std::to_string(lineno) + " (request " +
                                         std::to_string(request_ordinal) + "): timestamp " +
                                         format_double(ts) + " precedes " + format_double(last_ts));
                }
                needs_sort = true;
            }
            last_ts = std::max(last_ts, ts);
            trace.requests.push_back(Request{*idx, ts});
        } else {
            throw TraceError(TraceError::Kind::Malformed, lineno,
                             "line " + std::to_string(lineno) + ": unknown row tag '" + std::string(toks[0]) + "'");
        }
    }
    if (in.bad()) throw TraceError(TraceError::Kind::Io, lineno, "read error");

    if (needs_sort) {
        std::stable_sort(trace.requests.begin(), trace.requests.end(),
                         [](const Request& a, const Request& b) { return a.timestamp < b.timestamp; });
    }
    if (format.rebase_to_first_request && !trace.requests.empty()) {
        const double epoch = trace.requests.front().timestamp;
        if (epoch != 0.0) {
            for (auto& r : trace.requests) r.timestamp -= epoch;
            trace.catalog.rebase(epoch);
        }
    }
    return trace;
}

Trace load_trace(const std::string& path, const TraceFormat& format) {
    std::ifstream in(path);
    if (!in) throw TraceError(TraceError::Kind::Io, 0, "cannot open trace file: " + path);
    return parse_trace(in, format);
}

void write_trace(std::ostream& out, const Trace& trace) {
    for (const auto& m : trace.catalog.items()) {
        out << "C " << m.content_id << ' ' << format_double(m.publish_time) << ' ' << m.type << ' ' << m.area
            << ' ' << m.language << ' ' << format_double(m.length) << ' ' << format_double(m.score) << ' '
            << m.comment_count << ' ' << m.director << ' ' << m.performer << '\n';
    }
    for (const auto& r : trace.requests) {
        out << "R " << trace.catalog[r.content].content_id << ' ' << format_double(r.timestamp) << '\n';
    }
}

void save_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trace(out, trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

void SyntheticTraceConfig::validate() const {
    if (n_contents < 1) throw std::invalid_argument("n_contents must be at least 1");
    if (n_requests < 1) throw std::invalid_argument("n_requests must be at least 1");
    if (!(zipf_alpha > 0.0) || !std::isfinite(zipf_alpha))
        throw std::invalid_argument("zipf_alpha must be positive (exponent > 0)");
    if (!(reshuffle_period_hours >= 0.0)) throw std::invalid_argument("reshuffle_period_hours must be >= 0");
    if (!(mean_interarrival > 0.0) || !std::isfinite(mean_interarrival))
        throw std::invalid_argument("mean_interarrival must be positive");
}

namespace {

template <std::size_t N>
struct Categorical {
    std::array<const char*, N> labels;
    std::array<double, N> weights;

    const char* draw(Rng& rng) const {
        double total = 0;
        for (double w : weights) total += w;
        double u = uniform01(rng) * total;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (u < weights[i]) return labels[i];
            u -= weights[i];
        }
        return labels[N - 1];
    }
};

constexpr Categorical<6> kTypes{{"movie", "series", "variety", "anime", "documentary", "kids"},
                                {0.35, 0.30, 0.15, 0.10, 0.05, 0.05}};
constexpr Categorical<7> kAreas{{"mainland", "hongkong", "taiwan", "usa", "korea", "japan", "europe"},
                                {0.45, 0.10, 0.08, 0.15, 0.10, 0.07, 0.05}};
constexpr Categorical<5> kLanguages{{"mandarin", "cantonese", "english", "korean", "japanese"},
                                    {0.55, 0.10, 0.20, 0.08, 0.07}};
constexpr std::uint64_t kDirectorPool = 2000;
constexpr std::uint64_t kPerformerPool = 5000;
constexpr double kMaxPublishLeadDays = 30.0;

std::string padded_id(std::size_t i, std::size_t width) {
    std::string digits = std::to_string(i);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return "c" + digits;
}

}  // namespace

Trace generate_zipf_trace(const SyntheticTraceConfig& config) {
    config.validate();
    Trace trace;
    Rng meta_rng(mix_seed(config.rng_seed, 0));
    Rng order_rng(mix_seed(config.rng_seed, 1));
    Rng request_rng(mix_seed(config.rng_seed, 2));

    const std::size_t width = std::to_string(config.n_contents - 1).size();
    for (std::size_t i = 0; i < config.n_contents; ++i) {
        ContentMeta m;
        m.content_id = padded_id(i, width);
        m.publish_time = -std::floor(uniform_in(meta_rng, 0.0, kMaxPublishLeadDays * 24 * kSecondsPerHour));
        m.type = kTypes.draw(meta_rng);
        m.area = kAreas.draw(meta_rng);
        m.language = kLanguages.draw(meta_rng);
        m.length = 60.0 * std::floor(uniform_in(meta_rng, 20.0, 150.0));
        m.score = std::round(uniform_in(meta_rng, 20.0, 100.0)) / 10.0;
        m.comment_count = static_cast<std::uint64_t>(std::floor(exponential(meta_rng, 500.0)));
        m.director = "dir" + std::to_string(uniform_below(meta_rng, kDirectorPool));
        m.performer = "perf" + std::to_string(uniform_below(meta_rng, kPerformerPool));
        trace.catalog.add(std::move(m));
    }

    // Rank r (0-based) has mass (r+1)^-alpha.
    std::vector<double> cdf(config.n_contents);
    double acc = 0.0;
    for (std::size_t r = 0; r < config.n_contents; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -config.zipf_alpha);
        cdf[r] = acc;
    }

    std::vector<ContentIndex> rank_to_content(config.n_contents);
    for (std::size_t i = 0; i < config.n_contents; ++i) rank_to_content[i] = static_cast<ContentIndex>(i);
    shuffle(std::span<ContentIndex>(rank_to_content), order_rng);

    const double period = config.reshuffle_period_hours * kSecondsPerHour;
    std::uint64_t current_period = 0;

    trace.requests.reserve(config.n_requests);
    double t = 0.0;
    for (std::size_t k = 0; k < config.n_requests; ++k) {
        if (k > 0) t += exponential(request_rng, config.mean_interarrival);
        if (period > 0.0) {
            const auto p = static_cast<std::uint64_t>(std::floor(t / period));
            for (; current_period < p; ++current_period) {
                shuffle(std::span<ContentIndex>(rank_to_content), order_rng);
            }
        }
        const double u = uniform01(request_rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto rank = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), config.n_contents - 1);
        trace.requests.push_back(Request{rank_to_content[rank], t});
    }
    return trace;
}

std::pair<std::span<const Request>, std::span<const Request>>
split_trace(std::span<const Request> requests, double warmup_hours) {
    const double cutoff = warmup_hours * kSecondsPerHour;
    auto it = std::partition_point(requests.begin(), requests.end(),
                                   [cutoff](const Request& r) { return r.timestamp < cutoff; });
    const auto n = static_cast<std::size_t>(it - requests.begin());
    return {requests.first(n), requests.subspan(n)};
}

}  // namespace pacache
