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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "pacache/report.hpp"

using namespace pacache;
namespace fs = std::filesystem;

namespace {

SweepGrid small_grid() {
    SweepGrid g;
    g.traces[0].config.n_contents = 150;
    g.traces[0].config.n_requests = 3000;
    g.traces[0].config.mean_interarrival = 12.0 * kSecondsPerHour / 3000.0;
    g.traces[0].config.reshuffle_period_hours = 4.0;
    g.policies = {"lru", "lecar", "belady", "pa"};
    g.percentages = {2.0, 10.0};
    g.seeds = {1, 2, 3};
    g.base.warmup_hours = 4.0;
    g.base.network.depth = 3;
    g.base.network.first_width = 8;
    g.base.network.last_width = 4;
    g.base.network.batch_size = 32;
    g.base.network.hyper.eta = 0.5;
    return g;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pacache_report_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("single-cell sweep equals the simulation") {
    SweepGrid g = small_grid();
    g.policies = {"lru"};
    g.percentages = {2.0};
    g.seeds = {4};
    const ResultTable t = run_sweep(g, 1);
    REQUIRE(t.cells.size() == 1);
    REQUIRE(t.cells[0].ok);

    SyntheticTraceConfig cfg = g.traces[0].config;
    cfg.rng_seed = 4;
    SimConfig c = g.base;
    c.policy = "lru";
    c.cache_percentage = 2.0;
    c.seed = 4;
    const SimResult direct = run_simulation(generate_zipf_trace(cfg), c);
    CHECK(t.cells[0].result.test_hits == direct.test_hits);
    CHECK(t.cells[0].result.test_requests == direct.test_requests);
    REQUIRE(t.summary.size() == 1);
    CHECK(t.summary[0].mean == direct.hit_rate());
    CHECK(t.summary[0].variance == 0.0);
}

TEST_CASE("grid order and parallel determinism") {
    const SweepGrid g = small_grid();
    const ResultTable one = run_sweep(g, 1);
    const ResultTable many = run_sweep(g, 8);
    REQUIRE(one.cells.size() == g.cell_count());
    CHECK(g.cell_count() == 4 * 2 * 3);
    CHECK(one.cells[0].policy == "lru");
    CHECK(one.cells[1].policy == "lecar");
    CHECK(one.cells[4].percentage == 10.0);
    CHECK(one.cells[8].seed == 2);
    for (std::size_t i = 0; i < one.cells.size(); ++i) {
        CHECK(one.cells[i].ok);
        CHECK(one.cells[i].result.test_hits == many.cells[i].result.test_hits);
        CHECK(one.cells[i].result.evictions == many.cells[i].result.evictions);
    }
    const fs::path a = scratch("p1"), b = scratch("p8");
    emit_sweep(a, one);
    emit_sweep(b, many);
    for (const char* f : {"sweep.csv", "sweep_summary.csv", "hit_rate_series.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("a failing cell is isolated") {
    SweepGrid g = small_grid();
    g.policies = {"lru", "fifo"};
    g.seeds = {1};
    const ResultTable t = run_sweep(g, 2);
    REQUIRE(t.cells.size() == 4);
    CHECK(t.failures() == 2);
    CHECK(t.cells[0].ok);
    CHECK_FALSE(t.cells[1].ok);
    CHECK(t.cells[1].error.find("policy") != std::string::npos);
    const fs::path d = scratch("fail");
    emit_sweep(d, t);
    CHECK(slurp(d / "sweep.csv").find(",failed,") != std::string::npos);
}

TEST_CASE("summary statistics") {
    std::vector<CellResult> cells(3);
    const double rates[] = {0.2, 0.5, 0.3};
    for (std::size_t i = 0; i < 3; ++i) {
        cells[i].trace = "t";
        cells[i].policy = "lru";
        cells[i].percentage = 1.0;
        cells[i].seed = i + 1;
        cells[i].ok = true;
        cells[i].result.test_requests = 10;
        cells[i].result.test_hits = static_cast<std::uint64_t>(rates[i] * 10.0 + 0.5);
    }
    const auto rows = summarize(cells);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].runs == 3);
    CHECK(rows[0].mean == doctest::Approx(1.0 / 3.0));
    CHECK(rows[0].median == doctest::Approx(0.3));
    CHECK(rows[0].min == doctest::Approx(0.2));
    CHECK(rows[0].max == doctest::Approx(0.5));
    CHECK(rows[0].variance == doctest::Approx(((0.2 - 1.0 / 3) * (0.2 - 1.0 / 3) + (0.5 - 1.0 / 3) * (0.5 - 1.0 / 3) +
                                                (0.3 - 1.0 / 3) * (0.3 - 1.0 / 3)) / 2.0));
}

TEST_CASE("quantiles") {
    CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({5.0}, 0.75) == 5.0);
    CHECK(quantile({1.0, 9.0}, 0.0) == 1.0);
    CHECK(quantile({1.0, 9.0}, 1.0) == 9.0);
}

TEST_CASE("simulation emit: alpha rows and byte-identical reruns") {
    SyntheticTraceConfig cfg = small_grid().traces[0].config;
    const Trace t = generate_zipf_trace(cfg);
    SimConfig c = small_grid().base;
    c.policy = "pa";
    const SimResult r = run_simulation(t, c);
    REQUIRE_FALSE(r.retrains.empty());
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    emit_simulation(a, r, c.cache_percentage, c.seed);
    emit_simulation(b, run_simulation(t, c), c.cache_percentage, c.seed);
    for (const char* f : {"summary.csv", "hit_rate_series.csv", "alpha.csv", "batch_loss.csv", "retrain.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }

    std::istringstream alpha(slurp(a / "alpha.csv"));
    std::string line;
    std::getline(alpha, line);
    CHECK(line == "retrain,window,alpha_1,alpha_2,alpha_3");
    std::size_t rows = 0;
    while (std::getline(alpha, line)) {
        std::istringstream cols(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(cols, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 5);
        CHECK(v[2] + v[3] + v[4] == doctest::Approx(1.0).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == r.retrains.size());
}

TEST_CASE("convergence quantiles recompute from the curves") {
    ConvergenceConfig cc;
    cc.depth = 3;
    cc.first_width = 8;
    cc.last_width = 4;
    cc.batches = 120;
    cc.burn_in = 40;
    cc.seeds = {1, 2};
    const auto runs = run_convergence(cc, 2);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].evolving.size() == 120);
    const auto again = run_convergence(cc, 1);
    CHECK(runs[1].evolving == again[1].evolving);
    CHECK(runs[1].fixed == again[1].fixed);

    std::vector<double> tail;
    for (const auto& r : runs) tail.insert(tail.end(), r.evolving.begin() + 40, r.evolving.end());
    const fs::path d = scratch("conv");
    emit_convergence(d, runs, cc.burn_in);
    std::istringstream q(slurp(d / "loss_quantiles.csv"));
    std::string header, row;
    std::getline(q, header);
    CHECK(header == "model,burn_in,count,p25,p50,p75");
    std::getline(q, row);
    std::istringstream cols(row);
    std::vector<std::string> v;
    for (std::string cell; std::getline(cols, cell, ',');) v.push_back(cell);
    REQUIRE(v.size() == 6);
    CHECK(v[0] == "evolving");
    CHECK(std::stoul(v[2]) == tail.size());
    CHECK(std::stod(v[4]) == doctest::Approx(quantile(tail, 0.5)).epsilon(1e-15));
}

TEST_CASE("batches to converge") {
    std::vector<double> flat(100, 1.0);
    CHECK(batches_to_converge(flat, 5) == 5);
    std::vector<double> decay(200);
    for (std::size_t i = 0; i < decay.size(); ++i) decay[i] = 1.0 + 100.0 / (1.0 + static_cast<double>(i));
    const std::size_t k = batches_to_converge(decay, 1);
    CHECK(k > 1);
    CHECK(k < 200);
    CHECK(decay[k - 1] <= 1.1 * (std::accumulate(decay.end() - 20, decay.end(), 0.0) / 20.0));
}
