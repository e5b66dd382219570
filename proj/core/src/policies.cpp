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

#include "pacache/policies.hpp"

#include <cmath>
#include <unordered_map>

namespace pacache {

CachePolicy::CachePolicy(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("cache capacity must be at least 1");
}

void RecencyList::touch(ContentIndex c) {
    auto it = pos_.find(c);
    if (it != pos_.end()) {
        order_.splice(order_.end(), order_, it->second);
    } else {
        pos_.emplace(c, order_.insert(order_.end(), c));
    }
}

void RecencyList::erase(ContentIndex c) {
    auto it = pos_.find(c);
    if (it == pos_.end()) return;
    order_.erase(it->second);
    pos_.erase(it);
}

void FrequencyIndex::insert(ContentIndex c, std::uint64_t tick) {
    entries_[c] = {1, tick};
    order_.emplace(1, tick, c);
}

void FrequencyIndex::hit(ContentIndex c, std::uint64_t tick) {
    auto& e = entries_.at(c);
    order_.erase({e.first, e.second, c});
    e = {e.first + 1, tick};
    order_.emplace(e.first, e.second, c);
}

void FrequencyIndex::erase(ContentIndex c) {
    auto it = entries_.find(c);
    if (it == entries_.end()) return;
    order_.erase({it->second.first, it->second.second, c});
    entries_.erase(it);
}

PolicyDecision LruPolicy::on_request(ContentIndex content, double) {
    if (list_.contains(content)) {
        list_.touch(content);
        return {true, std::nullopt};
    }
    PolicyDecision d;
    if (list_.size() >= capacity_) {
        d.victim = list_.least_recent();
        list_.erase(*d.victim);
    }
    list_.touch(content);
    return d;
}

PolicyDecision LfuPolicy::on_request(ContentIndex content, double) {
    ++tick_;
    if (freq_.contains(content)) {
        freq_.hit(content, tick_);
        return {true, std::nullopt};
    }
    PolicyDecision d;
    if (freq_.size() >= capacity_) {
        d.victim = freq_.least_frequent();
        freq_.erase(*d.victim);
    }
    freq_.insert(content, tick_);
    return d;
}

void LecarPolicy::Ghost::push(ContentIndex c, std::uint64_t tick, std::size_t cap) {
    fifo.emplace_back(c, tick);
    live[c] = tick;
    while (live.size() > cap && !fifo.empty()) {
        auto [old, t] = fifo.front();
        fifo.pop_front();
        auto it = live.find(old);
        if (it != live.end() && it->second == t) live.erase(it);
    }
    // Drop stale heads left behind by take().
    while (!fifo.empty()) {
        auto it = live.find(fifo.front().first);
        if (it != live.end() && it->second == fifo.front().second) break;
        fifo.pop_front();
    }
}

std::optional<std::uint64_t> LecarPolicy::Ghost::take(ContentIndex c) {
    auto it = live.find(c);
    if (it == live.end()) return std::nullopt;
    const auto t = it->second;
    live.erase(it);
    return t;
}

LecarPolicy::LecarPolicy(std::size_t capacity, const LecarOptions& options)
    : CachePolicy(capacity),
      options_(options),
      discount_(options.discount > 0.0 ? options.discount : std::pow(0.005, 1.0 / static_cast<double>(capacity))),
      w_lru_(options.initial_lru_weight),
      w_lfu_(1.0 - options.initial_lru_weight),
      rng_(options.seed) {
    if (!(options.initial_lru_weight >= 0.0 && options.initial_lru_weight <= 1.0))
        throw std::invalid_argument("initial LRU weight must be in [0, 1]");
}

PolicyDecision LecarPolicy::on_request(ContentIndex content, double) {
    ++tick_;
    if (recency_.contains(content)) {
        recency_.touch(content);
        frequency_.hit(content, tick_);
        return {true, std::nullopt};
    }

    // Regret: the view whose eviction is now being undone loses weight.
    auto penalize = [this](double& w, std::uint64_t evicted_at) {
        if (options_.pinned) return;
        const double regret = std::pow(discount_, static_cast<double>(tick_ - evicted_at));
        w *= std::exp(-options_.learning_rate * regret);
        const double total = w_lru_ + w_lfu_;
        w_lru_ /= total;
        w_lfu_ /= total;
    };
    if (auto t = lru_ghost_.take(content)) {
        penalize(w_lru_, *t);
    } else if (auto t2 = lfu_ghost_.take(content)) {
        penalize(w_lfu_, *t2);
    }

    PolicyDecision d;
    if (recency_.size() >= capacity_) {
        const bool use_lru = uniform01(rng_) < w_lru_;
        const ContentIndex victim = use_lru ? recency_.least_recent() : frequency_.least_frequent();
        recency_.erase(victim);
        frequency_.erase(victim);
        (use_lru ? lru_ghost_ : lfu_ghost_).push(victim, tick_, capacity_);
        d.victim = victim;
    }
    recency_.touch(content);
    frequency_.insert(content, tick_);
    return d;
}

NextUseIndex belady_build(std::span<const Request> trace) {
    NextUseIndex idx;
    idx.contents.resize(trace.size());
    idx.next.assign(trace.size(), NextUseIndex::kNever);
    std::unordered_map<ContentIndex, std::size_t> upcoming;
    for (std::size_t i = trace.size(); i-- > 0;) {
        const ContentIndex c = trace[i].content;
        idx.contents[i] = c;
        auto it = upcoming.find(c);
        if (it != upcoming.end()) {
            idx.next[i] = it->second;
            it->second = i;
        } else {
            upcoming.emplace(c, i);
        }
    }
    return idx;
}

BeladyPolicy::BeladyPolicy(std::size_t capacity, std::shared_ptr<const NextUseIndex> index)
    : CachePolicy(capacity), index_(std::move(index)) {
    if (!index_) throw std::invalid_argument("belady policy needs a next-use index");
}

PolicyDecision BeladyPolicy::on_request(ContentIndex content, double) {
    if (cursor_ >= index_->contents.size())
        throw BeladyIndexError("request position " + std::to_string(cursor_) + " beyond indexed trace");
    if (index_->contents[cursor_] != content) {
        throw BeladyIndexError("request position " + std::to_string(cursor_) + " holds content " +
                               std::to_string(index_->contents[cursor_]) + ", got " + std::to_string(content));
    }
    const std::size_t next = index_->next[cursor_++];

    auto it = next_of_.find(content);
    if (it != next_of_.end()) {
        queue_.erase({it->second, content});
        it->second = next;
        queue_.emplace(next, content);
        return {true, std::nullopt};
    }
    PolicyDecision d;
    if (next_of_.size() >= capacity_) {
        const auto [victim_next, victim] = *queue_.begin();
        queue_.erase(queue_.begin());
        next_of_.erase(victim);
        d.victim = victim;
    }
    next_of_.emplace(content, next);
    queue_.emplace(next, content);
    return d;
}

PaPolicy::PaPolicy(std::size_t capacity, const PredictorHandle& predictor, PaOptions options)
    : CachePolicy(capacity), predictor_(&predictor), options_(std::move(options)) {
    if (!(options_.cold_start_fraction >= 0.0 && options_.cold_start_fraction < 1.0))
        throw std::invalid_argument("cold_start_fraction must be in [0, 1)");
    side_capacity_ = static_cast<std::size_t>(std::floor(options_.cold_start_fraction * static_cast<double>(capacity)));
}

std::optional<double> PaPolicy::queued_estimate(ContentIndex c) const {
    auto it = entries_.find(c);
    if (it == entries_.end() || it->second.side) return std::nullopt;
    return it->second.estimate;
}

std::optional<ContentIndex> PaPolicy::head() const {
    if (queue_.empty()) return std::nullopt;
    return std::get<2>(*queue_.begin());
}

ContentIndex PaPolicy::evict_main() {
    const ContentIndex victim = std::get<2>(*queue_.begin());
    queue_.erase(queue_.begin());
    entries_.erase(victim);
    return victim;
}

void PaPolicy::admit_main(ContentIndex c, double estimate) {
    entries_[c] = Entry{estimate, tick_, false};
    queue_.emplace(estimate, tick_, c);
}

PolicyDecision PaPolicy::on_request(ContentIndex content, double) {
    ++tick_;
    auto it = entries_.find(content);
    if (it != entries_.end()) {
        Entry& e = it->second;
        if (e.side) {
            side_.touch(content);
        } else {
            queue_.erase({e.estimate, e.last_access, content});
            queue_.emplace(e.estimate, tick_, content);
        }
        e.last_access = tick_;
        return {true, std::nullopt};
    }

    PolicyDecision d;
    const std::optional<double> est = predictor_->estimate(content);
    if (!est && side_capacity_ > 0) {
        if (side_.size() >= side_capacity_) {
            d.victim = side_.least_recent();
            side_.erase(*d.victim);
            entries_.erase(*d.victim);
        } else if (entries_.size() >= capacity_) {
            d.victim = evict_main();
        }
        side_.touch(content);
        entries_[content] = Entry{0.0, tick_, true};
        return d;
    }

    if (entries_.size() >= capacity_) {
        if (!queue_.empty()) {
            d.victim = evict_main();
        } else {
            d.victim = side_.least_recent();
            side_.erase(*d.victim);
            entries_.erase(*d.victim);
        }
    }
    admit_main(content, est.value_or(0.0));
    return d;
}

void PaPolicy::notify_window(std::size_t) {
    queue_.clear();
    std::vector<ContentIndex> promoted;
    for (auto& [c, e] : entries_) {
        const std::optional<double> est = predictor_->estimate(c);
        if (e.side) {
            if (!est) continue;
            promoted.push_back(c);
            e.side = false;
        }
        e.estimate = est.value_or(0.0);
        queue_.emplace(e.estimate, e.last_access, c);
    }
    for (ContentIndex c : promoted) side_.erase(c);
}

}  // namespace pacache
