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

#include "pacache/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pacache/features.hpp"
#include "pacache/predictors.hpp"

namespace pacache {

CacheState::CacheState(std::size_t n_contents, std::size_t capacity)
    : capacity_(capacity), slot_(n_contents, kAbsent) {
    if (capacity == 0) throw std::invalid_argument("cache capacity must be at least 1");
    members_.reserve(std::min(capacity, n_contents));
}

void CacheState::insert(ContentIndex c) {
    if (slot_.at(c) != kAbsent) throw InvariantViolation("duplicate insert of content " + std::to_string(c));
    if (members_.size() >= capacity_) throw InvariantViolation("insert into a full cache");
    slot_[c] = members_.size();
    members_.push_back(c);
}

void CacheState::erase(ContentIndex c) {
    const std::size_t pos = slot_.at(c);
    if (pos == kAbsent) throw InvariantViolation("victim " + std::to_string(c) + " is not cached");
    const ContentIndex last = members_.back();
    members_[pos] = last;
    slot_[last] = pos;
    members_.pop_back();
    slot_[c] = kAbsent;
}

void transition(CacheState& state, const PolicyDecision& decision, ContentIndex content) {
    if (decision.hit) {
        if (decision.victim) throw InvariantViolation("hit decision carries a victim");
        if (!state.contains(content)) throw InvariantViolation("hit reported for uncached content");
        return;
    }
    if (state.contains(content)) throw InvariantViolation("miss reported for cached content");
    if (decision.victim) {
        if (!state.full()) throw InvariantViolation("eviction while the cache has free slots");
        state.erase(*decision.victim);
    } else if (state.full()) {
        throw InvariantViolation("miss on a full cache without a victim");
    }
    state.insert(content);
}

std::vector<std::size_t> window_boundaries(std::span<const Request> trace, double window_hours) {
    if (!(window_hours > 0.0)) throw std::invalid_argument("window_hours must be positive");
    const double len = window_hours * kSecondsPerHour;
    std::vector<std::size_t> out;
    double next = len;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        while (trace[k].timestamp >= next) {
            out.push_back(k);
            next += len;
        }
    }
    return out;
}

std::size_t SimConfig::effective_capacity(std::size_t n_contents) const {
    if (capacity > 0) return capacity;
    return static_cast<std::size_t>(std::ceil(cache_percentage / 100.0 * static_cast<double>(n_contents) - 1e-9));
}

bool is_known_policy(const std::string& name) {
    return name == "lru" || name == "lfu" || name == "lecar" || name == "belady" || name == "pa" ||
           name == "pa-fnn" || name == "pa-oracle";
}

bool policy_learns(const std::string& name) { return name == "pa" || name == "pa-fnn"; }

void SimConfig::validate(std::size_t n_contents) const {
    if (!is_known_policy(policy)) throw std::invalid_argument("policy: unknown name '" + policy + "'");
    if (capacity == 0 && !(cache_percentage > 0.0 && cache_percentage <= 100.0))
        throw std::invalid_argument("cache_percentage must be in (0, 100]");
    if (n_contents > 0 && effective_capacity(n_contents) < 1) throw std::invalid_argument("capacity must be >= 1");
    if (!(window_hours > 0.0)) throw std::invalid_argument("window_hours must be positive");
    if (!(warmup_hours >= 0.0)) throw std::invalid_argument("warmup_hours must be >= 0");
    if (!(cold_start_fraction >= 0.0 && cold_start_fraction < 1.0))
        throw std::invalid_argument("cold_start_fraction must be in [0, 1)");
    if (policy_learns(policy)) {
        const auto& n = network;
        if (n.depth < 1) throw std::invalid_argument("network.depth must be >= 1");
        if (n.first_width < 1 || n.last_width < 1) throw std::invalid_argument("network widths must be >= 1");
        if (n.batch_size < 1) throw std::invalid_argument("network.batch_size must be >= 1");
        const auto& h = n.hyper;
        if (!(h.beta > 0.0 && h.beta < 1.0)) throw std::invalid_argument("beta must be in (0, 1)");
        if (!(h.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
        if (!(h.zeta > 0.0 && h.zeta < 1.0)) throw std::invalid_argument("zeta must be in (0, 1)");
        if (!(h.eta >= 0.0) || !std::isfinite(h.eta)) throw std::invalid_argument("eta must be finite and >= 0");
    }
}

std::unique_ptr<CachePolicy> make_policy(const SimConfig& config, std::size_t capacity,
                                         const PredictorHandle* predictor,
                                         std::shared_ptr<const NextUseIndex> index) {
    const std::string& name = config.policy;
    if (name == "lru") return std::make_unique<LruPolicy>(capacity);
    if (name == "lfu") return std::make_unique<LfuPolicy>(capacity);
    if (name == "lecar") {
        LecarOptions opts = config.lecar;
        opts.seed = mix_seed(config.seed, 11);
        return std::make_unique<LecarPolicy>(capacity, opts);
    }
    if (name == "belady") return std::make_unique<BeladyPolicy>(capacity, std::move(index));
    if (name == "pa" || name == "pa-fnn" || name == "pa-oracle") {
        if (!predictor) throw std::invalid_argument("policy '" + name + "' needs a predictor");
        return std::make_unique<PaPolicy>(capacity, *predictor, PaOptions{config.cold_start_fraction, name});
    }
    throw std::invalid_argument("policy: unknown name '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class Replay {
public:
    Replay(const Trace& trace, const SimConfig& config)
        : trace_(trace), config_(config), state_(trace.catalog.size(), config.effective_capacity(trace.catalog.size())),
          seen_(trace.catalog.size(), false) {
        const std::size_t n = trace.catalog.size();
        const std::size_t capacity = state_.capacity();
        result_.policy = config.policy;
        result_.n_contents = n;
        result_.capacity = capacity;

        std::shared_ptr<const NextUseIndex> index;
        if (config.policy == "belady") index = std::make_shared<NextUseIndex>(belady_build(trace.requests));

        if (policy_learns(config.policy)) {
            FeatureDatabaseOptions fopts;
            fopts.window_hours = config.window_hours;
            fopts.history_windows = config.history_windows;
            fopts.batch_size = config.network.batch_size;
            fopts.shuffle_seed = mix_seed(config.seed, 21);
            features_.emplace(trace.catalog, FeatureSchema::from_catalog(trace.catalog, config.max_vocabulary), fopts);

            Hyperparameters hp = config.network.hyper;
            if (config.policy == "pa-fnn") hp.recurrent = false;
            const auto widths =
                geometric_widths(config.network.depth, config.network.first_width, config.network.last_width);
            network_.emplace(features_->schema().dim(), widths, hp, mix_seed(config.seed, 31));
            predictor_ = std::make_unique<LearnedPredictor>(*features_, *network_, n);
        } else if (config.policy == "pa-oracle") {
            predictor_ = std::make_unique<OraclePredictor>(trace.requests, n, config.window_hours);
        }
        if (predictor_) predictor_->refresh(0);
        policy_ = make_policy(config, capacity, predictor_.get(), std::move(index));
    }

    SimResult run() {
        const double window_len = config_.window_hours * kSecondsPerHour;
        const double cutoff = config_.warmup_hours * kSecondsPerHour;
        double next_boundary = window_len;
        std::size_t window = 0;
        bool in_test = false;
        auto phase_start = Clock::now();

        for (const Request& r : trace_.requests) {
            while (r.timestamp >= next_boundary) {
                learn(window);
                ++window;
                next_boundary += window_len;
            }
            if (!in_test && r.timestamp >= cutoff) {
                result_.timing.warmup_seconds = seconds_since(phase_start);
                phase_start = Clock::now();
                in_test = true;
            }
            if (features_) features_->observe_request(r);
            serve(r, window, in_test);
        }
        if (in_test) {
            result_.timing.test_seconds = seconds_since(phase_start);
        } else {
            result_.timing.warmup_seconds = seconds_since(phase_start);
        }
        return std::move(result_);
    }

private:
    WindowStats& stats_for(std::size_t window) {
        while (result_.windows.size() <= window) {
            WindowStats w;
            w.window = result_.windows.size();
            result_.windows.push_back(w);
        }
        return result_.windows[window];
    }

    void serve(const Request& r, std::size_t window, bool in_test) {
        const ContentIndex c = r.content;
        const bool was_cached = state_.contains(c);
        const PolicyDecision d = policy_->on_request(c, r.timestamp);
        if (d.hit != was_cached) {
            fail("policy reported " + std::string(d.hit ? "hit" : "miss") + " but content " + std::to_string(c) +
                 (was_cached ? " is" : " is not") + " cached");
        }
        try {
            transition(state_, d, c);
        } catch (const InvariantViolation& e) {
            fail(e.what());
        }
        if (policy_->size() != state_.occupancy() || !policy_->contains(c) ||
            (d.victim && policy_->contains(*d.victim))) {
            fail("policy view diverged from the cache state");
        }
        if (config_.check_consistency) {
            for (ContentIndex m : state_.members()) {
                if (!policy_->contains(m)) fail("cached content " + std::to_string(m) + " missing from policy view");
            }
        }

        WindowStats& w = stats_for(window);
        ++w.requests;
        if (d.hit) ++w.hits;
        if (d.victim) ++result_.evictions;
        const bool cold = !seen_[c];
        seen_[c] = true;
        if (in_test) {
            ++w.test_requests;
            ++result_.test_requests;
            if (d.hit) {
                ++w.test_hits;
                ++result_.test_hits;
            } else if (cold) {
                ++result_.test_cold_misses;
            } else {
                ++result_.test_capacity_misses;
            }
            if (d.victim) ++result_.test_evictions;
        } else {
            ++result_.warmup_requests;
            if (d.hit) ++result_.warmup_hits;
        }
    }

    // Window `closed` just ended: roll features, retrain, refresh estimates, rebuild the queue.
    void learn(std::size_t closed) {
        stats_for(closed);
        if (features_) {
            const auto start = Clock::now();
            auto batches = features_->close_window();
            if (network_) {
                if (config_.network.reset_hidden_on_retrain) network_->reset_hidden_state();
                RetrainRecord rec;
                rec.window = closed;
                double loss_sum = 0.0;
                for (const auto& b : batches) {
                    try {
                        const StepDiagnostics diag = train_step(*network_, b.shifted(1.0));
                        result_.batch_losses.push_back({closed, rec.batches, diag.combined_loss});
                        loss_sum += diag.combined_loss;
                        ++rec.batches;
                        rec.samples += b.size();
                    } catch (const NonFiniteError&) {
                        ++rec.skipped_batches;
                    }
                }
                rec.mean_loss = rec.batches ? loss_sum / static_cast<double>(rec.batches) : 0.0;
                rec.alpha = network_->alpha();
                if (rec.batches > 0 || rec.skipped_batches > 0) result_.retrains.push_back(std::move(rec));
            }
            result_.timing.training_seconds += seconds_since(start);
        }
        if (predictor_) predictor_->refresh(closed + 1);
        policy_->notify_window(closed + 1);
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "invariant violation in policy '" << config_.policy << "': " << what << " [occupancy "
           << state_.occupancy() << "/" << state_.capacity() << ", policy size " << policy_->size()
           << ", test requests " << result_.test_requests << ", warm-up requests " << result_.warmup_requests
           << "]";
        throw InvariantViolation(os.str());
    }

    const Trace& trace_;
    const SimConfig& config_;
    CacheState state_;
    std::vector<bool> seen_;
    std::optional<FeatureDatabase> features_;
    std::optional<Network> network_;
    std::unique_ptr<PredictorHandle> predictor_;
    std::unique_ptr<CachePolicy> policy_;
    SimResult result_;
};

}  // namespace

SimResult run_simulation(const Trace& trace, const SimConfig& config) {
    config.validate(trace.catalog.size());
    if (trace.catalog.empty()) throw std::invalid_argument("trace has an empty catalog");
    for (std::size_t k = 1; k < trace.requests.size(); ++k) {
        if (trace.requests[k].timestamp < trace.requests[k - 1].timestamp)
            throw std::invalid_argument("trace requests are not sorted by timestamp");
    }
    if (!trace.requests.empty() && trace.requests.front().timestamp < 0.0)
        throw std::invalid_argument("trace timestamps must be relative to the trace epoch (>= 0)");

    SimResult result = Replay(trace, config).run();
    if (config.policy == "belady") {
        result.upper_bound_hit_rate = result.hit_rate();
    } else if (config.report_upper_bound) {
        SimConfig oracle = config;
        oracle.policy = "belady";
        oracle.report_upper_bound = false;
        oracle.check_consistency = false;
        result.upper_bound_hit_rate = Replay(trace, oracle).run().hit_rate();
    }
    return result;
}

}  // namespace pacache
