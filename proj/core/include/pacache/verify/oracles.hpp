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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pacache/evonet.hpp"
#include "pacache/policies.hpp"
#include "pacache/trace.hpp"

// Deliberately simple second implementations used as test oracles.
namespace pacache::verify {

/// Maximum hit count over every sequence of eviction choices with admission on every miss.
/// Memoized over (position, cached set); contents must be < 32.
[[nodiscard]] std::size_t exhaustive_max_hits(std::span<const ContentIndex> requests, std::size_t capacity);

/// Same maximum by plain recursion over the full choice tree (tiny inputs only).
[[nodiscard]] std::size_t brute_force_max_hits(std::span<const ContentIndex> requests, std::size_t capacity);

/// Trace over `n_contents` synthetic catalog entries with requests `spacing` seconds apart.
[[nodiscard]] Trace make_trace(std::span<const ContentIndex> requests, std::size_t n_contents, double spacing);

/// List-scan LRU: victim is the entry with the oldest access stamp.
[[nodiscard]] std::vector<PolicyDecision> reference_lru(std::span<const ContentIndex> requests, std::size_t capacity);
/// List-scan LFU over in-cache counts, ties by oldest access stamp.
[[nodiscard]] std::vector<PolicyDecision> reference_lfu(std::span<const ContentIndex> requests, std::size_t capacity);

/// Feeds `requests` to `policy` (timestamps = positions) and collects its decisions.
[[nodiscard]] std::vector<PolicyDecision> replay(CachePolicy& policy, std::span<const ContentIndex> requests);

struct NaiveForward {
    std::vector<std::vector<double>> layer_predictions;  // [layer][row]
    std::vector<double> combined;
};

/// Scalar loops over the gate formulas, row by row, against the stored hidden states.
[[nodiscard]] NaiveForward naive_forward(const Network& net, const Eigen::MatrixXd& x);

/// sum_l alpha_l * mrse(f^(l), y) evaluated with naive_forward.
[[nodiscard]] double naive_combined_loss(const Network& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Central difference of naive_combined_loss with respect to flat parameter i.
[[nodiscard]] double finite_difference(Network& net, std::size_t i, const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y, double step = 1e-5);

/// |a - n| / max(|a|, |n|, floor).
[[nodiscard]] double relative_error(double analytic, double numeric, double floor = 1e-6);

}  // namespace pacache::verify
