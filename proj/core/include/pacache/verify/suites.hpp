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

namespace pacache::verify {

struct SuiteOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Belady equals the exhaustive optimum and dominates every policy on random small traces.
[[nodiscard]] SuiteOutcome oracle_suite(std::size_t traces = 200, std::uint64_t seed = 1);
/// Analytic gradients against central finite differences.
[[nodiscard]] SuiteOutcome gradient_suite(std::size_t draws = 100, std::uint64_t seed = 1);
/// Simplex invariants after training steps and the two-expert closed form.
[[nodiscard]] SuiteOutcome hedge_suite(std::uint64_t seed = 1);
/// MRSE non-negativity, exactness and joint-scale invariance.
[[nodiscard]] SuiteOutcome loss_suite(std::size_t pairs = 1000, std::uint64_t seed = 1);
/// Optimized LRU/LFU and pinned LeCaR against the list-scan references.
[[nodiscard]] SuiteOutcome reference_suite(std::size_t requests = 100000, std::uint64_t seed = 1);

[[nodiscard]] std::vector<std::string> suite_names();
/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] SuiteOutcome run_suite(const std::string& name);

}  // namespace pacache::verify
