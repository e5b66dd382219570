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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacache/evonet.hpp"
#include "pacache/simulator.hpp"
#include "pacache/trace.hpp"

namespace pacache {

/// A named synthetic workload. Each sweep seed regenerates it with rng_seed = seed.
struct TraceSpec {
    std::string name = "zipf";
    SyntheticTraceConfig config;
};

struct SweepGrid {
    std::vector<std::string> policies{"lru", "lfu", "lecar", "belady", "pa"};
    std::vector<double> percentages{1.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<TraceSpec> traces{TraceSpec{}};
    /// When set, replaces `traces`: every cell replays this trace and seeds vary only the simulation.
    std::shared_ptr<const Trace> fixed_trace;
    std::string fixed_trace_name = "file";
    SimConfig base;

    [[nodiscard]] std::size_t cell_count() const;
};

struct CellResult {
    std::string trace;
    std::string policy;
    double percentage = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    SimResult result;
};

struct SummaryRow {
    std::string trace;
    std::string policy;
    double percentage = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double variance = 0.0;  // sample variance, 0 for a single run
};

struct ResultTable {
    std::vector<CellResult> cells;  // grid order: trace, seed, percentage, policy
    std::vector<SummaryRow> summary;

    [[nodiscard]] std::size_t failures() const;
};

/// Runs every cell on up to `parallelism` threads. Cells are independent and results land in
/// grid order, so the table does not depend on scheduling. A failing cell is recorded, not thrown.
[[nodiscard]] ResultTable run_sweep(const SweepGrid& grid, std::size_t parallelism);

/// Aggregates per (trace, policy, percentage) over successful cells.
[[nodiscard]] std::vector<SummaryRow> summarize(std::span<const CellResult> cells);

/// Linear-interpolation quantile (sorts a copy), q in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double q);

// CSV emitters. Each writes one file with a header row; all values are deterministic.

/// sweep.csv: trace,policy,percentage,seed,capacity,status,test_requests,test_hits,hit_rate,
/// warmup_requests,warmup_hits,warmup_hit_rate,evictions,upper_bound_hit_rate,error
void write_sweep_rows(const std::filesystem::path& file, std::span<const CellResult> cells);
/// sweep_summary.csv: trace,policy,percentage,runs,failures,mean,median,min,max,variance
void write_sweep_summary(const std::filesystem::path& file, std::span<const SummaryRow> rows);
/// summary.csv: key,value
void write_summary(const std::filesystem::path& file, const SimResult& result);
/// hit_rate_series.csv: policy,percentage,seed,window,requests,hits,test_requests,test_hits,
/// window_hit_rate,cumulative_test_hit_rate
void write_hit_rate_series(const std::filesystem::path& file, std::span<const CellResult> cells);
/// alpha.csv: retrain,window,alpha_1..alpha_L
void write_alpha(const std::filesystem::path& file, const SimResult& result);
/// batch_loss.csv: window,batch,combined_loss
void write_batch_losses(const std::filesystem::path& file, const SimResult& result);
/// retrain.csv: retrain,window,batches,samples,skipped_batches,mean_loss
void write_retrains(const std::filesystem::path& file, const SimResult& result);

/// Writes summary, hit_rate_series, and (for learning policies) alpha, batch_loss, retrain.
void emit_simulation(const std::filesystem::path& dir, const SimResult& result, double percentage,
                     std::uint64_t seed);
/// Writes sweep, sweep_summary and hit_rate_series.
void emit_sweep(const std::filesystem::path& dir, const ResultTable& table);

/// Evolving versus fixed-depth convergence on a learnable popularity process:
/// x ~ U[0,1]^d, y = 1 + w . x with fixed positive w drawn per seed.
struct ConvergenceConfig {
    std::size_t input_dim = 8;
    std::size_t depth = 10;
    std::size_t first_width = 32;
    std::size_t last_width = 8;
    std::size_t batch_size = 32;
    std::size_t batches = 1500;
    std::size_t burn_in = 500;
    /// Trailing moving-average length used to judge convergence.
    std::size_t smoothing = 25;
    double target_scale = 10.0;
    Hyperparameters hyper{.eta = 0.5};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct ConvergenceRun {
    std::uint64_t seed = 0;
    std::vector<double> evolving;  // combined loss per batch
    std::vector<double> fixed;
    std::size_t evolving_batches = 0;  // batches to reach within 10% of own final value
    std::size_t fixed_batches = 0;
    double evolving_final = 0.0;
    double fixed_final = 0.0;
};

[[nodiscard]] std::vector<ConvergenceRun> run_convergence(const ConvergenceConfig& config, std::size_t parallelism);

/// First batch whose trailing moving average is within `tolerance` (relative) of the final level,
/// the final level being the mean of the last tenth of the curve. Returns curve size when never reached.
[[nodiscard]] std::size_t batches_to_converge(std::span<const double> curve, std::size_t smoothing,
                                              double tolerance = 0.1);

/// loss_curve.csv: seed,batch,evolving,fixed
void write_loss_curve(const std::filesystem::path& file, std::span<const ConvergenceRun> runs);
/// loss_quantiles.csv: model,burn_in,count,p25,p50,p75 over all seeds' batches past burn-in
void write_loss_quantiles(const std::filesystem::path& file, std::span<const ConvergenceRun> runs,
                          std::size_t burn_in);
/// convergence.csv: seed,evolving_batches,fixed_batches,evolving_final,fixed_final
void write_convergence(const std::filesystem::path& file, std::span<const ConvergenceRun> runs);
void emit_convergence(const std::filesystem::path& dir, std::span<const ConvergenceRun> runs, std::size_t burn_in);

/// Runs `work(i)` for i in [0, n) on up to `parallelism` threads.
void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& work);

}  // namespace pacache
