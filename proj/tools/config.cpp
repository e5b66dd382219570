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

#include "config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace pacache::cli {

ExperimentConfig::ExperimentConfig() {
    sim.policy = "pa";
    sim.check_consistency = false;
}

namespace {

// Calls f(section, key, field) for every configurable field, in file order.
template <class Config, class F>
void visit(Config& c, F&& f) {
    f("", "out", c.out);

    f("trace", "path", c.trace_path);
    f("trace", "n_contents", c.synthetic.n_contents);
    f("trace", "n_requests", c.synthetic.n_requests);
    f("trace", "zipf_alpha", c.synthetic.zipf_alpha);
    f("trace", "reshuffle_period_hours", c.synthetic.reshuffle_period_hours);
    f("trace", "mean_interarrival", c.synthetic.mean_interarrival);
    f("trace", "rng_seed", c.synthetic.rng_seed);

    f("simulation", "policy", c.sim.policy);
    f("simulation", "cache_percentage", c.sim.cache_percentage);
    f("simulation", "capacity", c.sim.capacity);
    f("simulation", "phi_hours", c.sim.window_hours);
    f("simulation", "warmup_hours", c.sim.warmup_hours);
    f("simulation", "seed", c.sim.seed);
    f("simulation", "cold_start_fraction", c.sim.cold_start_fraction);
    f("simulation", "history_windows", c.sim.history_windows);
    f("simulation", "max_vocabulary", c.sim.max_vocabulary);
    f("simulation", "report_upper_bound", c.sim.report_upper_bound);
    f("simulation", "check_consistency", c.sim.check_consistency);

    f("lecar", "learning_rate", c.sim.lecar.learning_rate);
    f("lecar", "discount", c.sim.lecar.discount);
    f("lecar", "initial_lru_weight", c.sim.lecar.initial_lru_weight);

    f("network", "depth", c.sim.network.depth);
    f("network", "first_width", c.sim.network.first_width);
    f("network", "last_width", c.sim.network.last_width);
    f("network", "batch_size", c.sim.network.batch_size);
    f("network", "beta", c.sim.network.hyper.beta);
    f("network", "kappa", c.sim.network.hyper.kappa);
    f("network", "zeta", c.sim.network.hyper.zeta);
    f("network", "eta", c.sim.network.hyper.eta);
    f("network", "grad_clip", c.sim.network.hyper.grad_clip);
    f("network", "reset_hidden_on_retrain", c.sim.network.reset_hidden_on_retrain);

    f("sweep", "policies", c.sweep_policies);
    f("sweep", "percentages", c.sweep_percentages);
    f("sweep", "seeds", c.sweep_seeds);
    f("sweep", "jobs", c.jobs);

    f("convergence", "input_dim", c.convergence.input_dim);
    f("convergence", "depth", c.convergence.depth);
    f("convergence", "first_width", c.convergence.first_width);
    f("convergence", "last_width", c.convergence.last_width);
    f("convergence", "batch_size", c.convergence.batch_size);
    f("convergence", "batches", c.convergence.batches);
    f("convergence", "burn_in", c.convergence.burn_in);
    f("convergence", "smoothing", c.convergence.smoothing);
    f("convergence", "target_scale", c.convergence.target_scale);
    f("convergence", "eta", c.convergence.hyper.eta);
    f("convergence", "seeds", c.convergence.seeds);
}

std::string dotted(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
    nlohmann::ordered_json doc;
    visit(config, [&doc](const std::string& section, const std::string& key, const auto& value) {
        if (section.empty()) {
            doc[key] = value;
        } else {
            doc[section][key] = value;
        }
    });
    return doc;
}

ExperimentConfig from_json(const nlohmann::json& doc, ExperimentConfig base) {
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
    std::map<std::string, std::set<std::string>> allowed;
    visit(base, [&allowed](const std::string& section, const std::string& key, const auto&) {
        allowed[section].insert(key);
    });
    for (const auto& [name, value] : doc.items()) {
        if (allowed[""].count(name)) continue;
        auto it = allowed.find(name);
        if (it == allowed.end() || name.empty()) throw std::invalid_argument("config: unknown key '" + name + "'");
        if (!value.is_object()) throw std::invalid_argument("config: '" + name + "' must be an object");
        for (const auto& [key, _] : value.items()) {
            if (!it->second.count(key)) throw std::invalid_argument("config: unknown key '" + dotted(name, key) + "'");
        }
    }
    visit(base, [&doc](const std::string& section, const std::string& key, auto& field) {
        const nlohmann::json* node = &doc;
        if (!section.empty()) {
            if (!doc.contains(section)) return;
            node = &doc.at(section);
        }
        if (!node->contains(key)) return;
        try {
            node->at(key).get_to(field);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config: bad value for '" + dotted(section, key) + "': " + e.what());
        }
    });
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    return from_json(doc, std::move(base));
}

}  // namespace pacache::cli
