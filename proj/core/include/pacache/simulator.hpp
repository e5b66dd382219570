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
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacache/evonet.hpp"
#include "pacache/policies.hpp"
#include "pacache/trace.hpp"

namespace pacache {

/// Authoritative cached set (support of the cache indicator vector).
class CacheState {
public:
    CacheState(std::size_t n_contents, std::size_t capacity);

    [[nodiscard]] bool contains(ContentIndex c) const { return slot_.at(c) != kAbsent; }
    [[nodiscard]] std::size_t occupancy() const noexcept { return members_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool full() const noexcept { return members_.size() >= capacity_; }
    [[nodiscard]] std::span<const ContentIndex> members() const noexcept { return members_; }

    void insert(ContentIndex c);
    void erase(ContentIndex c);

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::size_t capacity_;
    std::vector<std::size_t> slot_;
    std::vector<ContentIndex> members_;
};

class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Applies one decision: hit leaves the state unchanged; a miss admits `content`,
/// first removing the victim when one is given. Throws InvariantViolation when the
/// decision is inconsistent with the state (absent victim, duplicate insert, overflow).
void transition(CacheState& state, const PolicyDecision& decision, ContentIndex content);

/// Request positions at which each window boundary (multiples of window_hours from t = 0)
/// is first crossed. Consecutive equal positions denote empty windows.
[[nodiscard]] std::vector<std::size_t> window_boundaries(std::span<const Request> trace, double window_hours);

struct NetworkConfig {
    std::size_t depth = 10;
    std::size_t first_width = 512;
    std::size_t last_width = 16;
    std::size_t batch_size = 128;
    Hyperparameters hyper;
    /// Zero the stored hidden states before each retrain.
    bool reset_hidden_on_retrain = false;
};

struct SimConfig {
    /// Percent of the catalog size; capacity = ceil(p / 100 * C).
    double cache_percentage = 1.0;
    /// Explicit capacity; 0 derives it from cache_percentage.
    std::size_t capacity = 0;
    double window_hours = 1.0;
    double warmup_hours = 168.0;
    /// lru | lfu | lecar | belady | pa | pa-fnn | pa-oracle
    std::string policy = "lru";
    LecarOptions lecar;
    double cold_start_fraction = 0.0;
    NetworkConfig network;
    /// Eligibility horizon in windows; 0 = one week.
    std::size_t history_windows = 0;
    std::size_t max_vocabulary = 32;
    std::uint64_t seed = 1;
    /// Also replay the offline optimum and report its hit rate.
    bool report_upper_bound = true;
    /// Compare the full cached set with the policy's view after every request.
    bool check_consistency = true;

    [[nodiscard]] std::size_t effective_capacity(std::size_t n_contents) const;
    /// Throws std::invalid_argument naming the offending field.
    void validate(std::size_t n_contents) const;
};

[[nodiscard]] bool is_known_policy(const std::string& name);
[[nodiscard]] bool policy_learns(const std::string& name);

struct WindowStats {
    std::size_t window = 0;
    std::uint64_t requests = 0;
    std::uint64_t hits = 0;
    std::uint64_t test_requests = 0;
    std::uint64_t test_hits = 0;
};

struct RetrainRecord {
    std::size_t window = 0;  // index of the window that just closed
    std::size_t batches = 0;
    std::size_t samples = 0;
    std::size_t skipped_batches = 0;  // aborted on non-finite values
    double mean_loss = 0.0;
    std::vector<double> alpha;
};

struct BatchLoss {
    std::size_t window = 0;
    std::size_t batch = 0;
    double combined_loss = 0.0;
};

struct SimResult {
    std::string policy;
    std::size_t n_contents = 0;
    std::size_t capacity = 0;

    std::uint64_t test_requests = 0;
    std::uint64_t test_hits = 0;
    std::uint64_t test_cold_misses = 0;
    std::uint64_t test_capacity_misses = 0;
    std::uint64_t test_evictions = 0;
    std::uint64_t warmup_requests = 0;
    std::uint64_t warmup_hits = 0;
    std::uint64_t evictions = 0;

    std::vector<WindowStats> windows;
    std::vector<RetrainRecord> retrains;
    std::vector<BatchLoss> batch_losses;
    std::optional<double> upper_bound_hit_rate;

    struct Timing {
        double warmup_seconds = 0.0;
        double test_seconds = 0.0;
        double training_seconds = 0.0;
    } timing;

    [[nodiscard]] double hit_rate() const noexcept {
        return test_requests ? static_cast<double>(test_hits) / static_cast<double>(test_requests) : 0.0;
    }
    [[nodiscard]] double warmup_hit_rate() const noexcept {
        return warmup_requests ? static_cast<double>(warmup_hits) / static_cast<double>(warmup_requests) : 0.0;
    }
};

/// Replays `trace` (sorted, times relative to its epoch) under `config`.
/// Warm-up requests drive the cache and the learner but are excluded from the headline hit rate.
[[nodiscard]] SimResult run_simulation(const Trace& trace, const SimConfig& config);

/// Builds the policy named in `config`; `predictor` is required for the popularity-aware policies,
/// `index` for belady.
[[nodiscard]] std::unique_ptr<CachePolicy> make_policy(const SimConfig& config, std::size_t capacity,
                                                       const PredictorHandle* predictor,
                                                       std::shared_ptr<const NextUseIndex> index);

}  // namespace pacache
