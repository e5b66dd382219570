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
#include <deque>
#include <list>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pacache/random.hpp"
#include "pacache/trace.hpp"

namespace pacache {

struct PolicyDecision {
    bool hit = false;
    std::optional<ContentIndex> victim;  // present iff a miss found the cache full

    friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

/// Source of popularity estimates for the popularity-aware policy.
/// Between refreshes `estimate` is a pure function of the content.
class PredictorHandle {
public:
    virtual ~PredictorHandle() = default;
    /// Non-negative score, or nullopt when the content has never been scored.
    [[nodiscard]] virtual std::optional<double> estimate(ContentIndex content) const = 0;
    /// Recomputes the snapshot for the window starting now.
    virtual void refresh(std::size_t window) = 0;
};

/// Uniform eviction-policy contract. Each policy keeps its own view of the cached set;
/// the simulator cross-checks it against the authoritative state.
class CachePolicy {
public:
    explicit CachePolicy(std::size_t capacity);
    virtual ~CachePolicy() = default;

    virtual PolicyDecision on_request(ContentIndex content, double timestamp) = 0;
    virtual void notify_window(std::size_t /*step*/) {}

    [[nodiscard]] virtual std::string_view name() const = 0;
    [[nodiscard]] virtual bool contains(ContentIndex content) const = 0;
    [[nodiscard]] virtual std::size_t size() const = 0;
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }

protected:
    std::size_t capacity_;
};

/// Recency order over a set of contents (front = least recent).
class RecencyList {
public:
    void touch(ContentIndex c);  // insert or move to most-recent
    void erase(ContentIndex c);
    [[nodiscard]] bool contains(ContentIndex c) const { return pos_.count(c) != 0; }
    [[nodiscard]] ContentIndex least_recent() const { return order_.front(); }
    [[nodiscard]] std::size_t size() const noexcept { return order_.size(); }
    [[nodiscard]] bool empty() const noexcept { return order_.empty(); }

private:
    std::list<ContentIndex> order_;
    std::unordered_map<ContentIndex, std::list<ContentIndex>::iterator> pos_;
};

/// Frequency order over a set of contents: minimum frequency first, ties by least recent access.
class FrequencyIndex {
public:
    void insert(ContentIndex c, std::uint64_t tick);  // frequency 1
    void hit(ContentIndex c, std::uint64_t tick);
    void erase(ContentIndex c);
    [[nodiscard]] bool contains(ContentIndex c) const { return entries_.count(c) != 0; }
    [[nodiscard]] ContentIndex least_frequent() const { return std::get<2>(*order_.begin()); }
    [[nodiscard]] std::uint64_t frequency(ContentIndex c) const { return entries_.at(c).first; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
    std::set<std::tuple<std::uint64_t, std::uint64_t, ContentIndex>> order_;
    std::unordered_map<ContentIndex, std::pair<std::uint64_t, std::uint64_t>> entries_;
};

class LruPolicy final : public CachePolicy {
public:
    using CachePolicy::CachePolicy;
    PolicyDecision on_request(ContentIndex content, double timestamp) override;
    [[nodiscard]] std::string_view name() const override { return "lru"; }
    [[nodiscard]] bool contains(ContentIndex c) const override { return list_.contains(c); }
    [[nodiscard]] std::size_t size() const override { return list_.size(); }

private:
    RecencyList list_;
};

/// Counts only in-cache history: an evicted content re-enters at frequency 1.
class LfuPolicy final : public CachePolicy {
public:
    using CachePolicy::CachePolicy;
    PolicyDecision on_request(ContentIndex content, double timestamp) override;
    [[nodiscard]] std::string_view name() const override { return "lfu"; }
    [[nodiscard]] bool contains(ContentIndex c) const override { return freq_.contains(c); }
    [[nodiscard]] std::size_t size() const override { return freq_.size(); }
    [[nodiscard]] std::uint64_t frequency(ContentIndex c) const { return freq_.frequency(c); }

private:
    FrequencyIndex freq_;
    std::uint64_t tick_ = 0;
};

struct LecarOptions {
    double learning_rate = 0.45;
    /// Regret discount per request of ghost age; 0 selects 0.005^(1/capacity).
    double discount = 0.0;
    double initial_lru_weight = 0.5;
    /// Keep the weights fixed at their initial values.
    bool pinned = false;
    std::uint64_t seed = 0;
};

/// Recency/frequency mixture with ghost-history regret updates.
class LecarPolicy final : public CachePolicy {
public:
    LecarPolicy(std::size_t capacity, const LecarOptions& options);
    PolicyDecision on_request(ContentIndex content, double timestamp) override;
    [[nodiscard]] std::string_view name() const override { return "lecar"; }
    [[nodiscard]] bool contains(ContentIndex c) const override { return recency_.contains(c); }
    [[nodiscard]] std::size_t size() const override { return recency_.size(); }

    [[nodiscard]] double lru_weight() const noexcept { return w_lru_; }
    [[nodiscard]] double lfu_weight() const noexcept { return w_lfu_; }
    [[nodiscard]] double discount() const noexcept { return discount_; }

private:
    enum class View { Lru, Lfu };
    struct Ghost {
        std::deque<std::pair<ContentIndex, std::uint64_t>> fifo;  // (id, eviction tick), may hold stale entries
        std::unordered_map<ContentIndex, std::uint64_t> live;
        void push(ContentIndex c, std::uint64_t tick, std::size_t cap);
        std::optional<std::uint64_t> take(ContentIndex c);
    };

    LecarOptions options_;
    double discount_;
    double w_lru_;
    double w_lfu_;
    RecencyList recency_;
    FrequencyIndex frequency_;
    Ghost lru_ghost_, lfu_ghost_;
    std::uint64_t tick_ = 0;
    Rng rng_;
};

/// Next-use table for the offline optimum: next[i] is the position of the next
/// request for the same content after position i, or `kNever`.
struct NextUseIndex {
    static constexpr std::size_t kNever = static_cast<std::size_t>(-1);
    std::vector<ContentIndex> contents;
    std::vector<std::size_t> next;
};

[[nodiscard]] NextUseIndex belady_build(std::span<const Request> trace);

class BeladyIndexError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Offline MIN: evicts the cached content whose next use is farthest away
/// (never-again first, ties by smallest content index). Must see the indexed trace in order.
class BeladyPolicy final : public CachePolicy {
public:
    BeladyPolicy(std::size_t capacity, std::shared_ptr<const NextUseIndex> index);
    PolicyDecision on_request(ContentIndex content, double timestamp) override;
    [[nodiscard]] std::string_view name() const override { return "belady"; }
    [[nodiscard]] bool contains(ContentIndex c) const override { return next_of_.count(c) != 0; }
    [[nodiscard]] std::size_t size() const override { return next_of_.size(); }

private:
    struct FarthestFirst {
        bool operator()(const std::pair<std::size_t, ContentIndex>& a,
                        const std::pair<std::size_t, ContentIndex>& b) const {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        }
    };

    std::shared_ptr<const NextUseIndex> index_;
    std::size_t cursor_ = 0;
    std::set<std::pair<std::size_t, ContentIndex>, FarthestFirst> queue_;
    std::unordered_map<ContentIndex, std::size_t> next_of_;
};

struct PaOptions {
    /// Share of the capacity run as plain LRU for contents without an estimate. Must be in [0, 1).
    double cold_start_fraction = 0.0;
    std::string name = "pa";
};

/// Popularity-aware eviction: a priority queue of cached contents keyed by estimated
/// popularity (ties by least recent access), re-scored at every window boundary.
class PaPolicy final : public CachePolicy {
public:
    PaPolicy(std::size_t capacity, const PredictorHandle& predictor, PaOptions options = {});
    PolicyDecision on_request(ContentIndex content, double timestamp) override;
    void notify_window(std::size_t step) override;
    [[nodiscard]] std::string_view name() const override { return options_.name; }
    [[nodiscard]] bool contains(ContentIndex c) const override { return entries_.count(c) != 0; }
    [[nodiscard]] std::size_t size() const override { return entries_.size(); }

    [[nodiscard]] std::size_t side_capacity() const noexcept { return side_capacity_; }
    [[nodiscard]] std::size_t side_size() const noexcept { return side_.size(); }
    [[nodiscard]] bool in_side_space(ContentIndex c) const { return side_.contains(c); }
    /// Estimate currently stored in the queue; nullopt if absent or held in the side space.
    [[nodiscard]] std::optional<double> queued_estimate(ContentIndex c) const;
    /// Content at the head of the queue (next main-space victim).
    [[nodiscard]] std::optional<ContentIndex> head() const;

private:
    struct Entry {
        double estimate = 0.0;
        std::uint64_t last_access = 0;
        bool side = false;
    };
    using Key = std::tuple<double, std::uint64_t, ContentIndex>;

    ContentIndex evict_main();
    void admit_main(ContentIndex c, double estimate);

    const PredictorHandle* predictor_;
    PaOptions options_;
    std::size_t side_capacity_;
    std::set<Key> queue_;
    std::unordered_map<ContentIndex, Entry> entries_;
    RecencyList side_;
    std::uint64_t tick_ = 0;
};

}  // namespace pacache
