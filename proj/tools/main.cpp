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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "pacache/features.hpp"
#include "pacache/report.hpp"
#include "pacache/simulator.hpp"
#include "pacache/trace.hpp"
#include "pacache/verify/suites.hpp"

namespace fs = std::filesystem;
using namespace pacache;
using pacache::cli::ExperimentConfig;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kInvariant = 3 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Flag values; unset flags leave the config file (or default) value alone.
struct Overrides {
    std::string config;
    std::optional<std::string> out, trace, policy;
    std::optional<double> cache_percentage, phi_hours, warmup_hours, cold_start_fraction;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, capacity;
    std::optional<double> beta, kappa, zeta, eta;
    std::optional<std::size_t> depth, batch_size, first_width, last_width;
    std::optional<bool> reset_hidden;
    // gen-trace
    std::optional<std::size_t> n_contents, n_requests;
    std::optional<double> zipf_alpha, reshuffle_hours, mean_interarrival;
    // sweep / converge
    std::vector<std::string> policies;
    std::vector<double> percentages;
    std::vector<std::uint64_t> seeds;
    std::optional<std::size_t> batches;
    // check
    std::vector<std::string> suites;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "JSON experiment config; flags override its values");
    app->add_option("--out", o.out, "Output directory");
}

void add_simulation(CLI::App* app, Overrides& o) {
    app->add_option("--trace", o.trace, "Trace file (omit to generate the synthetic workload)");
    app->add_option("--cache-percentage", o.cache_percentage, "Cache size as percent of the catalog");
    app->add_option("--capacity", o.capacity, "Explicit cache capacity in contents");
    app->add_option("--phi-hours", o.phi_hours, "Retraining window length in hours");
    app->add_option("--warmup-hours", o.warmup_hours, "Warm-up duration in hours");
    app->add_option("--seed", o.seed, "Simulation seed");
    app->add_option("--jobs", o.jobs, "Parallel workers");
    app->add_option("--beta", o.beta, "Hedge discount factor");
    app->add_option("--kappa", o.kappa, "Hedge loss clip");
    app->add_option("--zeta", o.zeta, "Hedge weight floor");
    app->add_option("--eta", o.eta, "Learning rate");
    app->add_option("--depth", o.depth, "Number of GRU layers");
    app->add_option("--batch-size", o.batch_size, "Mini-batch size");
    app->add_option("--first-width", o.first_width, "Width of the first GRU layer");
    app->add_option("--last-width", o.last_width, "Width of the last GRU layer");
    app->add_option("--cold-start-fraction", o.cold_start_fraction, "LRU side space share for unscored contents");
    app->add_option("--reset-hidden", o.reset_hidden, "Zero hidden states before each retrain");
}

template <class T>
void put(std::optional<T>& from, T& to) {
    if (from) to = *from;
}

ExperimentConfig resolve(Overrides& o, bool seed_is_trace_seed) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : cli::load_config(o.config);
    put(o.out, c.out);
    put(o.trace, c.trace_path);
    put(o.policy, c.sim.policy);
    put(o.cache_percentage, c.sim.cache_percentage);
    put(o.capacity, c.sim.capacity);
    put(o.phi_hours, c.sim.window_hours);
    put(o.warmup_hours, c.sim.warmup_hours);
    put(o.cold_start_fraction, c.sim.cold_start_fraction);
    put(o.seed, seed_is_trace_seed ? c.synthetic.rng_seed : c.sim.seed);
    put(o.jobs, c.jobs);
    put(o.beta, c.sim.network.hyper.beta);
    put(o.kappa, c.sim.network.hyper.kappa);
    put(o.zeta, c.sim.network.hyper.zeta);
    put(o.eta, c.sim.network.hyper.eta);
    put(o.depth, c.sim.network.depth);
    put(o.batch_size, c.sim.network.batch_size);
    put(o.first_width, c.sim.network.first_width);
    put(o.last_width, c.sim.network.last_width);
    put(o.reset_hidden, c.sim.network.reset_hidden_on_retrain);
    put(o.n_contents, c.synthetic.n_contents);
    put(o.n_requests, c.synthetic.n_requests);
    put(o.zipf_alpha, c.synthetic.zipf_alpha);
    put(o.reshuffle_hours, c.synthetic.reshuffle_period_hours);
    put(o.mean_interarrival, c.synthetic.mean_interarrival);
    if (!o.policies.empty()) c.sweep_policies = o.policies;
    if (!o.percentages.empty()) c.sweep_percentages = o.percentages;
    if (!o.seeds.empty()) {
        c.sweep_seeds = o.seeds;
        c.convergence.seeds = o.seeds;
    }
    put(o.batches, c.convergence.batches);
    if (c.jobs == 0) throw UsageError("jobs must be at least 1");
    return c;
}

void echo_config(const ExperimentConfig& c) {
    fs::create_directories(c.out);
    // out and jobs describe the invocation, not the experiment; leaving them out keeps reruns byte-identical
    auto doc = cli::to_json(c);
    doc.erase("out");
    doc["sweep"].erase("jobs");
    std::ofstream f(fs::path(c.out) / "config.json", std::ios::binary | std::ios::trunc);
    f << doc.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + (fs::path(c.out) / "config.json").string());
}

Trace obtain_trace(const ExperimentConfig& c) {
    if (!c.trace_path.empty()) return load_trace(c.trace_path);
    c.synthetic.validate();
    return generate_zipf_trace(c.synthetic);
}

int cmd_gen_trace(Overrides& o) {
    ExperimentConfig c = resolve(o, true);
    c.synthetic.validate();
    const Trace t = generate_zipf_trace(c.synthetic);
    echo_config(c);
    const fs::path file = fs::path(c.out) / "trace.txt";
    save_trace(file.string(), t);
    std::printf("wrote %s: C=%zu K=%zu span=%.3f hours\n", file.string().c_str(), t.catalog.size(),
                t.requests.size(), t.span() / kSecondsPerHour);
    return kOk;
}

int cmd_simulate(Overrides& o) {
    ExperimentConfig c = resolve(o, false);
    const Trace t = obtain_trace(c);
    c.sim.validate(t.catalog.size());
    const SimResult r = run_simulation(t, c.sim);
    echo_config(c);
    emit_simulation(c.out, r, c.sim.cache_percentage, c.sim.seed);
    if (policy_learns(r.policy)) {
        std::ofstream schema(fs::path(c.out) / "schema.txt", std::ios::binary | std::ios::trunc);
        schema << FeatureSchema::from_catalog(t.catalog, c.sim.max_vocabulary).describe();
    }
    std::printf("policy=%s C=%zu capacity=%zu test_requests=%llu hit_rate=%.6f warmup_hit_rate=%.6f", r.policy.c_str(),
                r.n_contents, r.capacity, static_cast<unsigned long long>(r.test_requests), r.hit_rate(),
                r.warmup_hit_rate());
    if (r.upper_bound_hit_rate) std::printf(" upper_bound=%.6f", *r.upper_bound_hit_rate);
    std::printf("\n");
    return kOk;
}

int cmd_sweep(Overrides& o) {
    ExperimentConfig c = resolve(o, false);
    SweepGrid grid;
    grid.policies = c.sweep_policies;
    grid.percentages = c.sweep_percentages;
    grid.seeds = c.sweep_seeds;
    grid.base = c.sim;
    if (!c.trace_path.empty()) {
        grid.fixed_trace = std::make_shared<const Trace>(load_trace(c.trace_path));
        grid.fixed_trace_name = fs::path(c.trace_path).stem().string();
    } else {
        c.synthetic.validate();
        grid.traces = {TraceSpec{"zipf", c.synthetic}};
    }
    for (const auto& p : grid.policies) {
        if (!is_known_policy(p)) throw UsageError("sweep.policies: unknown policy '" + p + "'");
    }
    if (grid.cell_count() == 0) throw UsageError("sweep grid is empty");
    const ResultTable table = run_sweep(grid, c.jobs);
    echo_config(c);
    emit_sweep(c.out, table);
    for (const auto& row : table.summary) {
        std::printf("%s %-9s p=%-5g runs=%zu failures=%zu mean=%.6f median=%.6f\n", row.trace.c_str(),
                    row.policy.c_str(), row.percentage, row.runs, row.failures, row.mean, row.median);
    }
    if (table.failures() > 0) {
        for (const auto& cell : table.cells) {
            if (!cell.ok)
                std::fprintf(stderr, "failed cell %s/%g/%llu: %s\n", cell.policy.c_str(), cell.percentage,
                             static_cast<unsigned long long>(cell.seed), cell.error.c_str());
        }
        return kRuntime;
    }
    return kOk;
}

int cmd_converge(Overrides& o) {
    ExperimentConfig c = resolve(o, false);
    const auto runs = run_convergence(c.convergence, c.jobs);
    echo_config(c);
    emit_convergence(c.out, runs, c.convergence.burn_in);
    std::size_t wins = 0;
    for (const auto& r : runs) {
        wins += r.evolving_batches <= r.fixed_batches;
        std::printf("seed=%llu evolving_batches=%zu fixed_batches=%zu evolving_final=%.6g fixed_final=%.6g\n",
                    static_cast<unsigned long long>(r.seed), r.evolving_batches, r.fixed_batches, r.evolving_final,
                    r.fixed_final);
    }
    std::printf("evolving converged no later on %zu of %zu seeds\n", wins, runs.size());
    return kOk;
}

int cmd_check(Overrides& o) {
    std::vector<std::string> names = o.suites.empty() ? verify::suite_names() : o.suites;
    const auto known = verify::suite_names();
    for (const auto& n : names) {
        if (std::find(known.begin(), known.end(), n) == known.end())
            throw UsageError("unknown suite '" + n + "'");
    }
    bool all = true;
    for (const auto& n : names) {
        const auto res = verify::run_suite(n);
        all = all && res.passed;
        std::printf("%-10s %s  %s\n", res.name.c_str(), res.passed ? "PASS" : "FAIL", res.detail.c_str());
        std::fflush(stdout);
    }
    return all ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven cache replacement simulator with a popularity-aware learned policy"};
    app.require_subcommand(1);
    Overrides o;

    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic Zipf trace");
    add_common(gen, o);
    gen->add_option("--seed", o.seed, "Generator seed");
    gen->add_option("--n-contents", o.n_contents, "Catalog size");
    gen->add_option("--n-requests", o.n_requests, "Number of requests");
    gen->add_option("--zipf-alpha", o.zipf_alpha, "Zipf exponent (> 0)");
    gen->add_option("--reshuffle-hours", o.reshuffle_hours, "Popularity re-permutation period, 0 = stationary");
    gen->add_option("--mean-interarrival", o.mean_interarrival, "Mean gap between requests in seconds");

    auto* sim = app.add_subcommand("simulate", "Replay a trace under one policy");
    add_common(sim, o);
    add_simulation(sim, o);
    sim->add_option("--policy", o.policy, "lru | lfu | lecar | belady | pa | pa-fnn | pa-oracle");

    auto* sweep = app.add_subcommand("sweep", "Run a policy x cache-percentage x seed grid");
    add_common(sweep, o);
    add_simulation(sweep, o);
    sweep->add_option("--policies", o.policies, "Policies to compare")->delimiter(',');
    sweep->add_option("--percentages", o.percentages, "Cache percentages")->delimiter(',');
    sweep->add_option("--seeds", o.seeds, "Repetition seeds")->delimiter(',');

    auto* conv = app.add_subcommand("converge", "Evolving versus fixed-depth loss curves");
    add_common(conv, o);
    conv->add_option("--seeds", o.seeds, "Seeds")->delimiter(',');
    conv->add_option("--batches", o.batches, "Training batches per seed");
    conv->add_option("--jobs", o.jobs, "Parallel workers");

    auto* check = app.add_subcommand("check", "Run the oracle and invariant suites");
    check->add_option("--suite", o.suites, "oracle | gradient | hedge | loss | reference (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_trace(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (conv->parsed()) return cmd_converge(o);
        return cmd_check(o);
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const BeladyIndexError& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const TraceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
}
