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

#include "pacache/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "pacache/csv.hpp"
#include "pacache/random.hpp"

namespace pacache {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& work) {
    const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::size_t SweepGrid::cell_count() const {
    const std::size_t n_traces = fixed_trace ? 1 : traces.size();
    return n_traces * seeds.size() * percentages.size() * policies.size();
}

std::size_t ResultTable::failures() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.ok; }));
}

ResultTable run_sweep(const SweepGrid& grid, std::size_t parallelism) {
    if (grid.cell_count() == 0) throw std::invalid_argument("sweep grid is empty");
    const std::size_t n_traces = grid.fixed_trace ? 1 : grid.traces.size();
    const std::size_t per_trace_seed = grid.percentages.size() * grid.policies.size();

    // One workload per (trace, seed); generation errors surface on every cell that needs it.
    std::vector<std::shared_ptr<const Trace>> workloads(n_traces * grid.seeds.size());
    std::vector<std::string> workload_errors(workloads.size());
    if (grid.fixed_trace) {
        std::fill(workloads.begin(), workloads.end(), grid.fixed_trace);
    } else {
        parallel_for(workloads.size(), parallelism, [&](std::size_t k) {
            SyntheticTraceConfig cfg = grid.traces[k / grid.seeds.size()].config;
            cfg.rng_seed = grid.seeds[k % grid.seeds.size()];
            try {
                workloads[k] = std::make_shared<const Trace>(generate_zipf_trace(cfg));
            } catch (const std::exception& e) {
                workload_errors[k] = e.what();
            }
        });
    }

    ResultTable table;
    table.cells.resize(grid.cell_count());
    parallel_for(table.cells.size(), parallelism, [&](std::size_t i) {
        const std::size_t w = i / per_trace_seed;
        const std::size_t rest = i % per_trace_seed;
        CellResult& cell = table.cells[i];
        cell.trace = grid.fixed_trace ? grid.fixed_trace_name : grid.traces[w / grid.seeds.size()].name;
        cell.seed = grid.seeds[w % grid.seeds.size()];
        cell.percentage = grid.percentages[rest / grid.policies.size()];
        cell.policy = grid.policies[rest % grid.policies.size()];
        if (!workloads[w]) {
            cell.error = "trace generation failed: " + workload_errors[w];
            return;
        }
        SimConfig cfg = grid.base;
        cfg.policy = cell.policy;
        cfg.cache_percentage = cell.percentage;
        cfg.capacity = 0;
        cfg.seed = cell.seed;
        try {
            cell.result = run_simulation(*workloads[w], cfg);
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    table.summary = summarize(table.cells);
    return table;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(std::span<const CellResult> cells) {
    // Keep first-appearance order of the keys so the table follows the grid layout.
    using Key = std::tuple<std::string, std::string, double>;
    std::vector<Key> order;
    std::map<Key, std::pair<std::vector<double>, std::size_t>> groups;
    for (const auto& c : cells) {
        Key k{c.trace, c.policy, c.percentage};
        auto [it, inserted] = groups.try_emplace(k);
        if (inserted) order.push_back(k);
        if (c.ok) {
            it->second.first.push_back(c.result.hit_rate());
        } else {
            ++it->second.second;
        }
    }
    std::vector<SummaryRow> rows;
    rows.reserve(order.size());
    for (const auto& k : order) {
        const auto& [values, failures] = groups.at(k);
        SummaryRow r;
        std::tie(r.trace, r.policy, r.percentage) = k;
        r.runs = values.size();
        r.failures = failures;
        if (!values.empty()) {
            const double n = static_cast<double>(values.size());
            r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
            r.median = quantile(values, 0.5);
            r.min = *std::min_element(values.begin(), values.end());
            r.max = *std::max_element(values.begin(), values.end());
            double ss = 0.0;
            for (double v : values) ss += (v - r.mean) * (v - r.mean);
            r.variance = values.size() > 1 ? ss / (n - 1.0) : 0.0;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

std::string csv_safe(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ch == ',' ? ';' : ' ';
    }
    return s;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_sweep_rows(const fs::path& file, std::span<const CellResult> cells) {
    CsvWriter w(file);
    w.header({"trace", "policy", "percentage", "seed", "capacity", "status", "test_requests", "test_hits",
              "hit_rate", "warmup_requests", "warmup_hits", "warmup_hit_rate", "evictions",
              "upper_bound_hit_rate", "error"});
    for (const auto& c : cells) {
        const SimResult& r = c.result;
        w.field(c.trace).field(c.policy).field(c.percentage).field(c.seed);
        if (c.ok) {
            w.field(r.capacity).field("ok").field(r.test_requests).field(r.test_hits).field(r.hit_rate());
            w.field(r.warmup_requests).field(r.warmup_hits).field(r.warmup_hit_rate()).field(r.evictions);
            w.field(optional_field(r.upper_bound_hit_rate)).field("");
        } else {
            for (int k = 0; k < 9; ++k) w.field(k == 1 ? "failed" : "");
            w.field(csv_safe(c.error));
        }
        w.end_row();
    }
}

void write_sweep_summary(const fs::path& file, std::span<const SummaryRow> rows) {
    CsvWriter w(file);
    w.header({"trace", "policy", "percentage", "runs", "failures", "mean", "median", "min", "max", "variance"});
    for (const auto& r : rows) {
        w.field(r.trace).field(r.policy).field(r.percentage).field(r.runs).field(r.failures);
        if (r.runs > 0) {
            w.field(r.mean).field(r.median).field(r.min).field(r.max).field(r.variance);
        } else {
            for (int k = 0; k < 5; ++k) w.field("");
        }
        w.end_row();
    }
}

void write_summary(const fs::path& file, const SimResult& r) {
    CsvWriter w(file);
    w.header({"key", "value"});
    auto kv = [&w](std::string_view k, auto v) {
        w.field(k).field(v);
        w.end_row();
    };
    kv("policy", std::string_view(r.policy));
    kv("n_contents", r.n_contents);
    kv("capacity", r.capacity);
    kv("test_requests", r.test_requests);
    kv("test_hits", r.test_hits);
    kv("test_misses", r.test_requests - r.test_hits);
    kv("test_cold_misses", r.test_cold_misses);
    kv("test_capacity_misses", r.test_capacity_misses);
    kv("test_evictions", r.test_evictions);
    kv("hit_rate", r.hit_rate());
    kv("warmup_requests", r.warmup_requests);
    kv("warmup_hits", r.warmup_hits);
    kv("warmup_hit_rate", r.warmup_hit_rate());
    kv("evictions", r.evictions);
    kv("windows", r.windows.size());
    kv("retrains", r.retrains.size());
    kv("upper_bound_hit_rate", std::string_view(optional_field(r.upper_bound_hit_rate)));
}

void write_hit_rate_series(const fs::path& file, std::span<const CellResult> cells) {
    CsvWriter w(file);
    w.header({"policy", "percentage", "seed", "window", "requests", "hits", "test_requests", "test_hits",
              "window_hit_rate", "cumulative_test_hit_rate"});
    for (const auto& c : cells) {
        if (!c.ok) continue;
        std::uint64_t cum_req = 0, cum_hits = 0;
        for (const auto& ws : c.result.windows) {
            cum_req += ws.test_requests;
            cum_hits += ws.test_hits;
            w.field(c.policy).field(c.percentage).field(c.seed).field(ws.window).field(ws.requests).field(ws.hits);
            w.field(ws.test_requests).field(ws.test_hits);
            w.field(ws.requests ? static_cast<double>(ws.hits) / static_cast<double>(ws.requests) : 0.0);
            w.field(cum_req ? static_cast<double>(cum_hits) / static_cast<double>(cum_req) : 0.0);
            w.end_row();
        }
    }
}

void write_alpha(const fs::path& file, const SimResult& result) {
    CsvWriter w(file);
    const std::size_t depth = result.retrains.empty() ? 0 : result.retrains.front().alpha.size();
    std::vector<std::string> cols{"retrain", "window"};
    for (std::size_t l = 1; l <= depth; ++l) cols.push_back("alpha_" + std::to_string(l));
    w.header(cols);
    for (std::size_t i = 0; i < result.retrains.size(); ++i) {
        const auto& r = result.retrains[i];
        w.field(i).field(r.window);
        for (double a : r.alpha) w.field(a);
        w.end_row();
    }
}

void write_batch_losses(const fs::path& file, const SimResult& result) {
    CsvWriter w(file);
    w.header({"window", "batch", "combined_loss"});
    for (const auto& b : result.batch_losses) {
        w.field(b.window).field(b.batch).field(b.combined_loss);
        w.end_row();
    }
}

void write_retrains(const fs::path& file, const SimResult& result) {
    CsvWriter w(file);
    w.header({"retrain", "window", "batches", "samples", "skipped_batches", "mean_loss"});
    for (std::size_t i = 0; i < result.retrains.size(); ++i) {
        const auto& r = result.retrains[i];
        w.field(i).field(r.window).field(r.batches).field(r.samples).field(r.skipped_batches).field(r.mean_loss);
        w.end_row();
    }
}

void emit_simulation(const fs::path& dir, const SimResult& result, double percentage, std::uint64_t seed) {
    write_summary(dir / "summary.csv", result);
    CellResult cell;
    cell.policy = result.policy;
    cell.percentage = percentage;
    cell.seed = seed;
    cell.ok = true;
    cell.result = result;
    write_hit_rate_series(dir / "hit_rate_series.csv", std::span<const CellResult>(&cell, 1));
    if (policy_learns(result.policy)) {
        write_alpha(dir / "alpha.csv", result);
        write_batch_losses(dir / "batch_loss.csv", result);
        write_retrains(dir / "retrain.csv", result);
    }
}

void emit_sweep(const fs::path& dir, const ResultTable& table) {
    write_sweep_rows(dir / "sweep.csv", table.cells);
    write_sweep_summary(dir / "sweep_summary.csv", table.summary);
    write_hit_rate_series(dir / "hit_rate_series.csv", table.cells);
}

std::size_t batches_to_converge(std::span<const double> curve, std::size_t smoothing, double tolerance) {
    if (curve.empty()) return 0;
    const std::size_t tail = std::max<std::size_t>(1, curve.size() / 10);
    const double final_level =
        std::accumulate(curve.end() - static_cast<std::ptrdiff_t>(tail), curve.end(), 0.0) / static_cast<double>(tail);
    const std::size_t k = std::max<std::size_t>(1, smoothing);
    double window_sum = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        window_sum += curve[i];
        if (i >= k) window_sum -= curve[i - k];
        const double avg = window_sum / static_cast<double>(std::min(i + 1, k));
        if (i + 1 >= k && avg <= final_level * (1.0 + tolerance)) return i + 1;
    }
    return curve.size();
}

std::vector<ConvergenceRun> run_convergence(const ConvergenceConfig& config, std::size_t parallelism) {
    if (config.batches == 0 || config.batch_size == 0) throw std::invalid_argument("convergence needs batches");
    std::vector<ConvergenceRun> runs(config.seeds.size());
    const auto widths = geometric_widths(config.depth, config.first_width, config.last_width);
    const auto d = static_cast<Eigen::Index>(config.input_dim);
    const auto m = static_cast<Eigen::Index>(config.batch_size);

    parallel_for(runs.size(), parallelism, [&](std::size_t s) {
        ConvergenceRun& run = runs[s];
        run.seed = config.seeds[s];
        Rng rng(mix_seed(run.seed, 41));
        Eigen::VectorXd w(d);
        for (Eigen::Index j = 0; j < d; ++j) w[j] = uniform_in(rng, 0.0, 1.0);
        w *= config.target_scale / w.sum();

        Hyperparameters fixed_hp = config.hyper;
        fixed_hp.freeze_alpha = true;
        Network evolving(config.input_dim, widths, config.hyper, mix_seed(run.seed, 42));
        Network fixed(config.input_dim, widths, fixed_hp, mix_seed(run.seed, 42));
        std::vector<double> last_only(config.depth, 0.0);
        last_only.back() = 1.0;
        fixed.set_alpha(last_only);

        run.evolving.reserve(config.batches);
        run.fixed.reserve(config.batches);
        TrainingBatch batch;
        batch.x.resize(m, d);
        batch.ids.resize(config.batch_size);
        for (std::size_t b = 0; b < config.batches; ++b) {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < d; ++j) batch.x(i, j) = uniform01(rng);
            batch.y = (batch.x * w).array() + 1.0;
            auto step = [&batch](Network& net) {
                try {
                    return train_step(net, batch).combined_loss;
                } catch (const NonFiniteError&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            run.evolving.push_back(step(evolving));
            run.fixed.push_back(step(fixed));
        }
        run.evolving_batches = batches_to_converge(run.evolving, config.smoothing);
        run.fixed_batches = batches_to_converge(run.fixed, config.smoothing);
        const std::size_t tail = std::max<std::size_t>(1, config.batches / 10);
        auto tail_mean = [tail](const std::vector<double>& c) {
            return std::accumulate(c.end() - static_cast<std::ptrdiff_t>(tail), c.end(), 0.0) /
                   static_cast<double>(tail);
        };
        run.evolving_final = tail_mean(run.evolving);
        run.fixed_final = tail_mean(run.fixed);
    });
    return runs;
}

void write_loss_curve(const fs::path& file, std::span<const ConvergenceRun> runs) {
    CsvWriter w(file);
    w.header({"seed", "batch", "evolving", "fixed"});
    for (const auto& r : runs) {
        for (std::size_t b = 0; b < r.evolving.size(); ++b) {
            w.field(r.seed).field(b).field(r.evolving[b]).field(r.fixed[b]);
            w.end_row();
        }
    }
}

void write_loss_quantiles(const fs::path& file, std::span<const ConvergenceRun> runs, std::size_t burn_in) {
    CsvWriter w(file);
    w.header({"model", "burn_in", "count", "p25", "p50", "p75"});
    auto row = [&](std::string_view model, std::vector<double> ConvergenceRun::*curve) {
        std::vector<double> pooled;
        for (const auto& r : runs) {
            const auto& c = r.*curve;
            if (c.size() > burn_in) pooled.insert(pooled.end(), c.begin() + static_cast<std::ptrdiff_t>(burn_in), c.end());
        }
        w.field(model).field(burn_in).field(pooled.size());
        w.field(quantile(pooled, 0.25)).field(quantile(pooled, 0.5)).field(quantile(pooled, 0.75));
        w.end_row();
    };
    row("evolving", &ConvergenceRun::evolving);
    row("fixed", &ConvergenceRun::fixed);
}

void write_convergence(const fs::path& file, std::span<const ConvergenceRun> runs) {
    CsvWriter w(file);
    w.header({"seed", "evolving_batches", "fixed_batches", "evolving_final", "fixed_final"});
    for (const auto& r : runs) {
        w.field(r.seed).field(r.evolving_batches).field(r.fixed_batches).field(r.evolving_final).field(r.fixed_final);
        w.end_row();
    }
}

void emit_convergence(const fs::path& dir, std::span<const ConvergenceRun> runs, std::size_t burn_in) {
    write_loss_curve(dir / "loss_curve.csv", runs);
    write_loss_quantiles(dir / "loss_quantiles.csv", runs, burn_in);
    write_convergence(dir / "convergence.csv", runs);
}

}  // namespace pacache
