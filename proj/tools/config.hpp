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

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pacache/report.hpp"
#include "pacache/simulator.hpp"
#include "pacache/trace.hpp"

namespace pacache::cli {

/// Everything a command needs, mirrored one-to-one by the JSON config file.
struct ExperimentConfig {
    std::string out = "out";
    std::string trace_path;  // empty: generate from `synthetic`
    SyntheticTraceConfig synthetic;
    SimConfig sim;
    std::vector<std::string> sweep_policies{"lru", "lfu", "lecar", "belady", "pa"};
    std::vector<double> sweep_percentages{0.1, 0.5, 1.0, 2.0, 5.0};
    std::vector<std::uint64_t> sweep_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::size_t jobs = 1;
    ConvergenceConfig convergence;

    ExperimentConfig();
};

[[nodiscard]] nlohmann::ordered_json to_json(const ExperimentConfig& config);
/// Overlays `doc` on `base`. Unknown sections or keys and type mismatches throw std::invalid_argument.
[[nodiscard]] ExperimentConfig from_json(const nlohmann::json& doc, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

}  // namespace pacache::cli
