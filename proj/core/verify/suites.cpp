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

#include "pacache/verify/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pacache/evonet.hpp"
#include "pacache/random.hpp"
#include "pacache/simulator.hpp"
#include "pacache/verify/oracles.hpp"

namespace pacache::verify {

namespace {

SuiteOutcome outcome(std::string name, bool passed, const std::ostringstream& detail) {
    return {std::move(name), passed, detail.str()};
}

std::vector<ContentIndex> zipf_indices(Rng& rng, std::size_t n, std::size_t contents, double alpha) {
    std::vector<double> cdf(contents);
    double total = 0.0;
    for (std::size_t i = 0; i < contents; ++i) {
        total += std::pow(static_cast<double>(i + 1), -alpha);
        cdf[i] = total;
    }
    std::vector<ContentIndex> out(n);
    for (auto& c : out) {
        const double u = uniform01(rng) * total;
        c = static_cast<ContentIndex>(std::min<std::size_t>(
            static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), contents - 1));
    }
    return out;
}

}  // namespace

SuiteOutcome oracle_suite(std::size_t traces, std::uint64_t seed) {
    std::ostringstream detail;
    bool ok = true;

    // Worked example: s=2, A B C A B D A admits exactly two hits at the optimum.
    const std::vector<ContentIndex> example{0, 1, 2, 0, 1, 3, 0};
    if (exhaustive_max_hits(example, 2) != 2 || brute_force_max_hits(example, 2) != 2) {
        ok = false;
        detail << "worked example optimum differs from 2; ";
    }

    const std::vector<std::string> policies{"lru", "lfu", "lecar", "pa", "pa-fnn", "pa-oracle"};
    Rng rng(mix_seed(seed, 101));
    std::size_t checked = 0, dominated = 0;
    for (std::size_t t = 0; t < traces && ok; ++t) {
        const std::size_t n_contents = 2 + static_cast<std::size_t>(uniform_below(rng, 7));
        const std::size_t length = 1 + static_cast<std::size_t>(uniform_below(rng, 50));
        const std::size_t s = 2 + static_cast<std::size_t>(uniform_below(rng, 2));
        std::vector<ContentIndex> req(length);
        for (auto& c : req) c = static_cast<ContentIndex>(uniform_below(rng, n_contents));
        const Trace trace = make_trace(req, n_contents, 600.0);

        SimConfig cfg;
        cfg.capacity = s;
        cfg.warmup_hours = 0.0;
        cfg.report_upper_bound = false;
        cfg.seed = seed + t;
        cfg.network.depth = 2;
        cfg.network.first_width = 4;
        cfg.network.last_width = 2;
        cfg.network.batch_size = 4;
        cfg.network.hyper.eta = 0.1;

        const std::size_t optimum = exhaustive_max_hits(req, s);
        if (length <= 14 && brute_force_max_hits(req, s) != optimum) {
            ok = false;
            detail << "trace " << t << ": memoized and plain searches disagree; ";
        }
        cfg.policy = "belady";
        const auto belady = run_simulation(trace, cfg).test_hits;
        if (belady != optimum) {
            ok = false;
            detail << "trace " << t << ": belady " << belady << " hits, optimum " << optimum << "; ";
        }
        if (s == 2) {
            SimConfig bigger = cfg;
            bigger.capacity = 3;
            if (run_simulation(trace, bigger).test_hits < belady) {
                ok = false;
                detail << "trace " << t << ": belady not monotone in capacity; ";
            }
        }
        for (const auto& p : policies) {
            cfg.policy = p;
            const auto hits = run_simulation(trace, cfg).test_hits;
            if (hits > belady) {
                ok = false;
                detail << "trace " << t << ": " << p << " " << hits << " > belady " << belady << "; ";
            }
            ++dominated;
        }
        ++checked;
    }
    detail << checked << " traces, " << dominated << " policy comparisons";
    return outcome("oracle", ok, detail);
}

SuiteOutcome gradient_suite(std::size_t draws, std::uint64_t seed) {
    std::ostringstream detail;
    Rng rng(mix_seed(seed, 202));
    double worst = 0.0;
    std::size_t entries = 0;
    std::string worst_at;
    for (std::size_t k = 0; k < draws; ++k) {
        const std::size_t depth = 1 + k % 3;
        const std::size_t d = 1 + static_cast<std::size_t>(uniform_below(rng, 5));
        const auto m = static_cast<Eigen::Index>(1 + uniform_below(rng, 4));
        std::vector<std::size_t> widths(depth);
        for (auto& w : widths) w = 1 + static_cast<std::size_t>(uniform_below(rng, 8));

        Network net(d, widths, Hyperparameters{}, rng());
        for (std::size_t i = 0; i < net.parameter_count(); ++i) net.set_parameter(i, uniform_in(rng, -1.0, 1.0));
        for (std::size_t l = 0; l < depth; ++l) {
            auto& h = net.mutable_layer(l).hidden;
            for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = uniform_in(rng, -0.9, 0.9);
        }
        std::vector<double> alpha(depth);
        for (auto& a : alpha) a = uniform_in(rng, 0.05, 1.0);
        const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
        for (auto& a : alpha) a /= total;
        net.set_alpha(alpha);

        Eigen::MatrixXd x(m, static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = uniform01(rng);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) y[i] = uniform_in(rng, 0.5, 2.0);

        const Gradients g = backward(net, forward(net, x), y);
        for (std::size_t i = 0; i < net.parameter_count(); ++i) {
            const double numeric = finite_difference(net, i, x, y);
            const double err = relative_error(g.entry(i), numeric);
            ++entries;
            if (err > worst) {
                worst = err;
                std::ostringstream at;
                at << "draw " << k << " parameter " << i << " analytic " << g.entry(i) << " numeric " << numeric;
                worst_at = at.str();
            }
        }
    }
    const bool ok = worst <= 1e-4;
    detail << draws << " draws, " << entries << " entries, max relative error " << worst;
    if (!ok) detail << " (" << worst_at << ")";
    return outcome("gradient", ok, detail);
}

SuiteOutcome hedge_suite(std::uint64_t seed) {
    std::ostringstream detail;
    bool ok = true;
    Rng rng(mix_seed(seed, 303));

    // (a) Simplex invariants after every training step across random settings.
    std::size_t steps = 0;
    double worst_sum = 0.0;
    for (std::size_t k = 0; k < 24 && ok; ++k) {
        Hyperparameters hp;
        hp.beta = uniform_in(rng, 0.5, 0.999);
        hp.kappa = uniform_in(rng, 0.5, 100.0);
        hp.zeta = uniform_in(rng, 0.01, 0.5);
        hp.eta = std::array<double, 3>{0.0, 0.1, 10.0}[k % 3];
        const std::size_t depth = 1 + static_cast<std::size_t>(uniform_below(rng, 6));
        const std::size_t d = 1 + static_cast<std::size_t>(uniform_below(rng, 6));
        std::vector<std::size_t> widths(depth);
        for (auto& w : widths) w = 1 + static_cast<std::size_t>(uniform_below(rng, 8));
        Network net(d, widths, hp, rng());
        const double floor_share = (hp.zeta / static_cast<double>(depth)) / (1.0 + hp.zeta);
        for (std::size_t s = 0; s < 40; ++s) {
            TrainingBatch b;
            const auto m = static_cast<Eigen::Index>(1 + uniform_below(rng, 16));
            b.x.resize(m, static_cast<Eigen::Index>(d));
            for (Eigen::Index i = 0; i < b.x.size(); ++i) b.x.data()[i] = uniform01(rng);
            b.y.resize(m);
            for (Eigen::Index i = 0; i < m; ++i) b.y[i] = 1.0 + std::floor(uniform_in(rng, 0.0, 20.0));
            b.ids.assign(static_cast<std::size_t>(m), 0);
            try {
                (void)train_step(net, b);
            } catch (const NonFiniteError&) {
                continue;
            }
            ++steps;
            const auto& a = net.alpha();
            const double sum = std::accumulate(a.begin(), a.end(), 0.0);
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            if (std::abs(sum - 1.0) > 1e-9 || *std::min_element(a.begin(), a.end()) < floor_share - 1e-12) {
                ok = false;
                detail << "simplex violated at config " << k << " step " << s << "; ";
                break;
            }
        }
    }
    detail << steps << " steps, max |sum - 1| " << worst_sum << "; ";

    // (b) Two experts with constant losses 0.1 and 0.9 against the closed form.
    const double beta = 0.99, kappa = 100.0, zeta = 0.1;
    auto closed_form = [&](std::size_t t) {
        const double floor_value = zeta / 2.0;
        const double a = std::max(0.5 * std::pow(beta, 0.1 * static_cast<double>(t)), floor_value);
        const double b = std::max(0.5 * std::pow(beta, 0.9 * static_cast<double>(t)), floor_value);
        return std::array<double, 2>{a / (a + b), b / (a + b)};
    };
    std::vector<double> alpha{0.5, 0.5};
    const std::vector<double> losses{0.1, 0.9};
    double worst_direct = 0.0;
    for (std::size_t t = 1; t <= 200; ++t) {
        alpha = hedge_update(alpha, losses, beta, kappa, zeta);
        const auto cf = closed_form(t);
        worst_direct = std::max({worst_direct, std::abs(alpha[0] - cf[0]), std::abs(alpha[1] - cf[1])});
    }

    // Same trajectory through train_step: eta = 0 freezes two regressors whose outputs give those losses.
    Hyperparameters hp;
    hp.beta = beta;
    hp.kappa = kappa;
    hp.zeta = zeta;
    hp.eta = 0.0;
    hp.recurrent = false;
    const std::vector<std::size_t> widths{1, 1};
    Network net(1, widths, hp, 7);
    for (std::size_t l = 0; l < 2; ++l) {
        GruLayer& g = net.mutable_layer(l);
        g.w_r.setZero();
        g.w_z.setZero();
        g.w_h.setZero();
        g.u_r.setZero();
        g.u_z.setZero();
        g.u_h.setZero();
        g.b_r.setZero();
        g.b_z.setConstant(-60.0);
        g.b_h.setConstant(std::atanh(0.5));
        g.hidden.setZero();
    }
    TrainingBatch b;
    b.x = Eigen::MatrixXd::Constant(4, 1, 0.5);
    b.y = Eigen::VectorXd::Ones(4);
    b.ids.assign(4, 0);
    const ForwardTrace probe = forward(net, b.x);
    for (std::size_t l = 0; l < 2; ++l) {
        const double h = probe.layers[l].h(0, 0);
        net.mutable_layer(l).theta(0) = (1.0 - std::sqrt(losses[l])) / h;
    }
    double worst_step = 0.0;
    for (std::size_t t = 1; t <= 200; ++t) {
        const StepDiagnostics diag = train_step(net, b);
        const auto cf = closed_form(t);
        worst_step = std::max({worst_step, std::abs(diag.alpha[0] - cf[0]), std::abs(diag.alpha[1] - cf[1])});
    }
    const bool tracks = worst_direct <= 1e-12 && worst_step <= 1e-12 && alpha[0] > 0.8 && net.alpha()[0] > 0.8;
    if (!tracks) ok = false;
    detail << "two-expert max deviation " << worst_direct << " (hedge) " << worst_step << " (train_step), final "
           << alpha[0];
    return outcome("hedge", ok, detail);
}

SuiteOutcome loss_suite(std::size_t pairs, std::uint64_t seed) {
    std::ostringstream detail;
    bool ok = true;
    Eigen::VectorXd f0(2), y0(2);
    f0 << 2.0, 2.0;
    y0 << 1.0, 2.0;
    if (mrse_loss(f0, y0) != 0.5) {
        ok = false;
        detail << "worked example differs from 0.5; ";
    }
    Rng rng(mix_seed(seed, 404));
    double worst_scale = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto m = static_cast<Eigen::Index>(1 + uniform_below(rng, 32));
        Eigen::VectorXd f(m), y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            f[i] = uniform_in(rng, -5.0, 10.0);
            y[i] = uniform_in(rng, 0.1, 10.0);
        }
        const double c = uniform_in(rng, 0.01, 100.0);
        const double loss = mrse_loss(f, y);
        const double scaled = mrse_loss(c * f, c * y);
        const double diff = std::abs(scaled - loss) / std::max(1.0, loss);
        worst_scale = std::max(worst_scale, diff);
        if (!(loss >= 0.0) || mrse_loss(y, y) != 0.0 || diff > 1e-12) {
            ok = false;
            detail << "pair " << k << " failed; ";
            break;
        }
    }
    detail << pairs << " pairs, max scale deviation " << worst_scale;
    return outcome("loss", ok, detail);
}

SuiteOutcome reference_suite(std::size_t requests, std::uint64_t seed) {
    std::ostringstream detail;
    bool ok = true;
    Rng rng(mix_seed(seed, 505));
    for (const std::size_t s : {std::size_t{16}, std::size_t{100}}) {
        const auto req = zipf_indices(rng, requests, 2000, 0.8);
        const auto want_lru = reference_lru(req, s);
        const auto want_lfu = reference_lfu(req, s);

        LruPolicy lru(s);
        LfuPolicy lfu(s);
        LecarOptions pin_lru{.initial_lru_weight = 1.0, .pinned = true, .seed = seed};
        LecarOptions pin_lfu{.initial_lru_weight = 0.0, .pinned = true, .seed = seed};
        LecarPolicy lecar_lru(s, pin_lru);
        LecarPolicy lecar_lfu(s, pin_lfu);
        const bool a = replay(lru, req) == want_lru;
        const bool b = replay(lfu, req) == want_lfu;
        const bool c = replay(lecar_lru, req) == want_lru;
        const bool d = replay(lecar_lfu, req) == want_lfu;
        if (!(a && b && c && d)) ok = false;
        detail << "s=" << s << ": lru " << (a ? "ok" : "DIFF") << ", lfu " << (b ? "ok" : "DIFF")
               << ", lecar(1,0) " << (c ? "ok" : "DIFF") << ", lecar(0,1) " << (d ? "ok" : "DIFF") << "; ";
    }
    detail << requests << " requests per trace";
    return outcome("reference", ok, detail);
}

std::vector<std::string> suite_names() { return {"oracle", "gradient", "hedge", "loss", "reference"}; }

SuiteOutcome run_suite(const std::string& name) {
    if (name == "oracle") return oracle_suite();
    if (name == "gradient") return gradient_suite();
    if (name == "hedge") return hedge_suite();
    if (name == "loss") return loss_suite();
    if (name == "reference") return reference_suite();
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace pacache::verify
