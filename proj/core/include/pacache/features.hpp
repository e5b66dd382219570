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

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pacache/trace.hpp"

namespace pacache {

/// 64-bit FNV-1a. Used for the high-cardinality hash slices and schema fingerprints.
[[nodiscard]] std::uint64_t fnv1a(std::string_view s) noexcept;

struct Slice {
    std::size_t offset = 0;
    std::size_t width = 0;
};

/// Fixed layout of the encoded feature vector:
///   [prev_count, age_hours, length, score, comment_count | type | area | language | director# | performer#]
/// Each low-cardinality slice holds its vocabulary followed by one reserved "other" slot.
class FeatureSchema {
public:
    enum Numeric : std::size_t { kPrevCount = 0, kAgeHours, kLength, kScore, kComments, kNumericCount };

    static constexpr std::size_t kDefaultDirectorBuckets = 64;
    static constexpr std::size_t kDefaultPerformerBuckets = 128;
    static constexpr std::size_t kDefaultMaxVocabulary = 32;

    FeatureSchema(std::vector<std::string> types, std::vector<std::string> areas,
                  std::vector<std::string> languages, std::size_t director_buckets = kDefaultDirectorBuckets,
                  std::size_t performer_buckets = kDefaultPerformerBuckets);

    /// Vocabularies are the catalog's most frequent values (ties lexicographic), capped at `max_vocabulary`.
    static FeatureSchema from_catalog(const Catalog& catalog, std::size_t max_vocabulary = kDefaultMaxVocabulary,
                                      std::size_t director_buckets = kDefaultDirectorBuckets,
                                      std::size_t performer_buckets = kDefaultPerformerBuckets);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] Slice type_slice() const noexcept { return type_; }
    [[nodiscard]] Slice area_slice() const noexcept { return area_; }
    [[nodiscard]] Slice language_slice() const noexcept { return language_; }
    [[nodiscard]] Slice director_slice() const noexcept { return director_; }
    [[nodiscard]] Slice performer_slice() const noexcept { return performer_; }

    [[nodiscard]] const std::vector<std::string>& type_vocabulary() const noexcept { return types_; }
    [[nodiscard]] const std::vector<std::string>& area_vocabulary() const noexcept { return areas_; }
    [[nodiscard]] const std::vector<std::string>& language_vocabulary() const noexcept { return languages_; }

    /// Human-readable layout dump (one line per slot group).
    [[nodiscard]] std::string describe() const;
    [[nodiscard]] std::uint64_t fingerprint() const;

private:
    std::vector<std::string> types_, areas_, languages_;
    std::size_t director_buckets_, performer_buckets_;
    Slice type_, area_, language_, director_, performer_;
    std::size_t dim_;

    friend Eigen::VectorXd encode_semantic(const ContentMeta&, const FeatureSchema&);
};

/// Raw (un-normalized) d-vector: numeric semantic fields in their slots, one-hot and
/// hash slices set, contextual slots left at zero.
[[nodiscard]] Eigen::VectorXd encode_semantic(const ContentMeta& meta, const FeatureSchema& schema);

struct TrainingBatch {
    Eigen::MatrixXd x;  // m x d, entries in [0, 1]
    Eigen::VectorXd y;  // m ground-truth access counts
    std::vector<ContentIndex> ids;

    [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }

    /// Copy with targets shifted by `offset`; the relative-error loss needs y > 0.
    [[nodiscard]] TrainingBatch shifted(double offset = 1.0) const;
};

class WindowSkewError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FeatureDatabaseOptions {
    double window_hours = 1.0;
    /// Eligibility horizon in windows; 0 selects one week (7 * 24 / window_hours).
    std::size_t history_windows = 0;
    std::size_t batch_size = 128;
    std::uint64_t shuffle_seed = 0;
};

/// Per-content contextual counters plus cached semantic encodings.
/// Single writer: observe_request, close_window, normalize and serving_features mutate.
class FeatureDatabase {
public:
    FeatureDatabase(const Catalog& catalog, FeatureSchema schema, FeatureDatabaseOptions options = {});

    /// Throws WindowSkewError if the timestamp lies outside the current window.
    void observe_request(const Request& request);

    /// Emits shuffled training batches for every content requested within the history
    /// horizon, then rotates counters and advances the window index.
    /// With no known content it only advances the window.
    std::vector<TrainingBatch> close_window();

    /// Min-max normalization of the numeric slots with running ranges updated first.
    Eigen::VectorXd normalize(Eigen::VectorXd raw);

    struct ServingSet {
        std::vector<ContentIndex> ids;
        Eigen::MatrixXd x;
    };
    /// Features for every known content at the start of the current window
    /// (previous-window count = count of the window just closed).
    ServingSet serving_features();

    [[nodiscard]] const FeatureSchema& schema() const noexcept { return schema_; }
    [[nodiscard]] std::size_t window_index() const noexcept { return window_; }
    [[nodiscard]] double window_start() const noexcept;
    [[nodiscard]] double window_end() const noexcept;
    [[nodiscard]] std::size_t history_windows() const noexcept { return history_windows_; }
    [[nodiscard]] std::size_t known_count() const noexcept { return known_; }
    [[nodiscard]] bool is_known(ContentIndex c) const { return records_.at(c).known; }
    [[nodiscard]] std::uint32_t current_count(ContentIndex c) const { return records_.at(c).current; }
    [[nodiscard]] std::uint32_t previous_count(ContentIndex c) const { return records_.at(c).previous; }
    [[nodiscard]] std::uint64_t observed_since_close() const noexcept { return observed_since_close_; }

private:
    struct Record {
        bool known = false;
        std::uint32_t current = 0;
        std::uint32_t previous = 0;
        std::size_t last_window = 0;
        Eigen::VectorXd semantic;
    };
    struct Range {
        bool seen = false;
        double lo = 0.0;
        double hi = 0.0;
    };

    Eigen::VectorXd raw_features(ContentIndex c, double at_time) const;

    const Catalog* catalog_;
    FeatureSchema schema_;
    FeatureDatabaseOptions options_;
    std::size_t history_windows_;
    std::vector<Record> records_;
    std::array<Range, FeatureSchema::kNumericCount> ranges_{};
    std::size_t window_ = 0;
    std::size_t known_ = 0;
    std::uint64_t observed_since_close_ = 0;
};

}  // namespace pacache
