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

#include "pacache/features.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "pacache/random.hpp"

namespace pacache {

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

FeatureSchema::FeatureSchema(std::vector<std::string> types, std::vector<std::string> areas,
                             std::vector<std::string> languages, std::size_t director_buckets,
                             std::size_t performer_buckets)
    : types_(std::move(types)),
      areas_(std::move(areas)),
      languages_(std::move(languages)),
      director_buckets_(director_buckets),
      performer_buckets_(performer_buckets) {
    if (director_buckets_ == 0 || performer_buckets_ == 0)
        throw std::invalid_argument("hash bucket counts must be positive");
    std::size_t off = kNumericCount;
    auto take = [&off](std::size_t width) {
        Slice s{off, width};
        off += width;
        return s;
    };
    type_ = take(types_.size() + 1);
    area_ = take(areas_.size() + 1);
    language_ = take(languages_.size() + 1);
    director_ = take(director_buckets_);
    performer_ = take(performer_buckets_);
    dim_ = off;
}

namespace {

std::vector<std::string> top_values(const Catalog& catalog, std::string ContentMeta::*field, std::size_t cap) {
    std::map<std::string, std::size_t> freq;
    for (const auto& m : catalog.items()) ++freq[m.*field];
    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > cap) ranked.resize(cap);
    std::vector<std::string> out;
    out.reserve(ranked.size());
    for (auto& [v, n] : ranked) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

void one_hot(Eigen::VectorXd& v, Slice s, const std::vector<std::string>& vocab, const std::string& value) {
    auto it = std::lower_bound(vocab.begin(), vocab.end(), value);
    const std::size_t pos =
        (it != vocab.end() && *it == value) ? static_cast<std::size_t>(it - vocab.begin()) : vocab.size();
    v[static_cast<Eigen::Index>(s.offset + pos)] = 1.0;
}

}  // namespace

FeatureSchema FeatureSchema::from_catalog(const Catalog& catalog, std::size_t max_vocabulary,
                                          std::size_t director_buckets, std::size_t performer_buckets) {
    return FeatureSchema(top_values(catalog, &ContentMeta::type, max_vocabulary),
                         top_values(catalog, &ContentMeta::area, max_vocabulary),
                         top_values(catalog, &ContentMeta::language, max_vocabulary), director_buckets,
                         performer_buckets);
}

std::string FeatureSchema::describe() const {
    std::ostringstream os;
    os << "dim " << dim_ << '\n';
    os << "0 1 prev_count numeric\n";
    os << "1 1 age_hours numeric\n";
    os << "2 1 length numeric\n";
    os << "3 1 score numeric\n";
    os << "4 1 comment_count numeric\n";
    auto vocab = [&os](const char* name, Slice s, const std::vector<std::string>& values) {
        os << s.offset << ' ' << s.width << ' ' << name << " one-hot";
        for (const auto& v : values) os << ' ' << v;
        os << " <other>\n";
    };
    vocab("type", type_, types_);
    vocab("area", area_, areas_);
    vocab("language", language_, languages_);
    os << director_.offset << ' ' << director_.width << " director fnv1a-bucket\n";
    os << performer_.offset << ' ' << performer_.width << " performer fnv1a-bucket\n";
    return os.str();
}

std::uint64_t FeatureSchema::fingerprint() const { return fnv1a(describe()); }

Eigen::VectorXd encode_semantic(const ContentMeta& meta, const FeatureSchema& schema) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schema.dim()));
    v[FeatureSchema::kLength] = meta.length;
    v[FeatureSchema::kScore] = meta.score;
    v[FeatureSchema::kComments] = static_cast<double>(meta.comment_count);
    one_hot(v, schema.type_, schema.types_, meta.type);
    one_hot(v, schema.area_, schema.areas_, meta.area);
    one_hot(v, schema.language_, schema.languages_, meta.language);
    v[static_cast<Eigen::Index>(schema.director_.offset + fnv1a(meta.director) % schema.director_buckets_)] = 1.0;
    v[static_cast<Eigen::Index>(schema.performer_.offset + fnv1a(meta.performer) % schema.performer_buckets_)] =
        1.0;
    return v;
}

TrainingBatch TrainingBatch::shifted(double offset) const {
    TrainingBatch out = *this;
    out.y.array() += offset;
    return out;
}

FeatureDatabase::FeatureDatabase(const Catalog& catalog, FeatureSchema schema, FeatureDatabaseOptions options)
    : catalog_(&catalog), schema_(std::move(schema)), options_(options), records_(catalog.size()) {
    if (!(options_.window_hours > 0.0)) throw std::invalid_argument("window_hours must be positive");
    if (options_.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    history_windows_ = options_.history_windows;
    if (history_windows_ == 0) {
        history_windows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(7.0 * 24.0 / options_.window_hours)));
    }
}

double FeatureDatabase::window_start() const noexcept {
    return static_cast<double>(window_) * options_.window_hours * kSecondsPerHour;
}

double FeatureDatabase::window_end() const noexcept {
    return static_cast<double>(window_ + 1) * options_.window_hours * kSecondsPerHour;
}

void FeatureDatabase::observe_request(const Request& request) {
    if (request.timestamp < window_start() || request.timestamp >= window_end()) {
        throw WindowSkewError("request at t=" + std::to_string(request.timestamp) + " outside window " +
                              std::to_string(window_) + " [" + std::to_string(window_start()) + ", " +
                              std::to_string(window_end()) + ")");
    }
    auto& rec = records_.at(request.content);
    if (!rec.known) {
        rec.known = true;
        rec.semantic = encode_semantic((*catalog_)[request.content], schema_);
        ++known_;
    }
    ++rec.current;
    rec.last_window = window_;
    ++observed_since_close_;
}

Eigen::VectorXd FeatureDatabase::normalize(Eigen::VectorXd raw) {
    for (std::size_t f = 0; f < FeatureSchema::kNumericCount; ++f) {
        const double v = raw[static_cast<Eigen::Index>(f)];
        auto& r = ranges_[f];
        if (!r.seen) {
            r = Range{true, v, v};
        } else {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
        raw[static_cast<Eigen::Index>(f)] = r.hi > r.lo ? (v - r.lo) / (r.hi - r.lo) : 0.0;
    }
    return raw;
}

Eigen::VectorXd FeatureDatabase::raw_features(ContentIndex c, double at_time) const {
    const auto& rec = records_[c];
    Eigen::VectorXd raw = rec.semantic;
    raw[FeatureSchema::kPrevCount] = rec.previous;
    raw[FeatureSchema::kAgeHours] = (at_time - (*catalog_)[c].publish_time) / kSecondsPerHour;
    return raw;
}

std::vector<TrainingBatch> FeatureDatabase::close_window() {
    if (known_ == 0) {
        ++window_;
        observed_since_close_ = 0;
        return {};
    }

    std::vector<ContentIndex> eligible;
    const std::size_t oldest = window_ + 1 >= history_windows_ ? window_ + 1 - history_windows_ : 0;
    for (ContentIndex c = 0; c < records_.size(); ++c) {
        const auto& rec = records_[c];
        if (rec.known && rec.last_window >= oldest) eligible.push_back(c);
    }

    const auto d = static_cast<Eigen::Index>(schema_.dim());
    const double end = window_end();
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(eligible.size());
    for (ContentIndex c : eligible) xs.push_back(normalize(raw_features(c, end)));

    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(options_.shuffle_seed, window_));
    shuffle(std::span<std::size_t>(order), rng);

    std::vector<TrainingBatch> batches;
    for (std::size_t begin = 0; begin < order.size(); begin += options_.batch_size) {
        const std::size_t m = std::min(options_.batch_size, order.size() - begin);
        TrainingBatch b;
        b.x.resize(static_cast<Eigen::Index>(m), d);
        b.y.resize(static_cast<Eigen::Index>(m));
        b.ids.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t s = order[begin + i];
            b.x.row(static_cast<Eigen::Index>(i)) = xs[s].transpose();
            b.y[static_cast<Eigen::Index>(i)] = records_[eligible[s]].current;
            b.ids[i] = eligible[s];
        }
        batches.push_back(std::move(b));
    }

    for (auto& rec : records_) {
        rec.previous = rec.current;
        rec.current = 0;
    }
    ++window_;
    observed_since_close_ = 0;
    return batches;
}

FeatureDatabase::ServingSet FeatureDatabase::serving_features() {
    ServingSet out;
    out.ids.reserve(known_);
    for (ContentIndex c = 0; c < records_.size(); ++c) {
        if (records_[c].known) out.ids.push_back(c);
    }
    out.x.resize(static_cast<Eigen::Index>(out.ids.size()), static_cast<Eigen::Index>(schema_.dim()));
    const double now = window_start();
    for (std::size_t i = 0; i < out.ids.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = normalize(raw_features(out.ids[i], now)).transpose();
    }
    return out;
}

}  // namespace pacache
