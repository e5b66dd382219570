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
#include <optional>
#include <span>
#include <vector>

#include "pacache/evonet.hpp"
#include "pacache/features.hpp"
#include "pacache/policies.hpp"

namespace pacache {

/// Estimates held in a dense table; contents never assigned stay unknown.
class TablePredictor : public PredictorHandle {
public:
    explicit TablePredictor(std::size_t n_contents) : values_(n_contents) {}

    [[nodiscard]] std::optional<double> estimate(ContentIndex content) const override {
        return content < values_.size() ? values_[content] : std::nullopt;
    }
    void refresh(std::size_t) override {}

    void set(ContentIndex content, double value) { values_.at(content) = value; }
    void clear(ContentIndex content) { values_.at(content).reset(); }

protected:
    std::vector<std::optional<double>> values_;
};

/// Ground truth: the number of requests each content receives in the window being served.
class OraclePredictor final : public PredictorHandle {
public:
    OraclePredictor(std::span<const Request> trace, std::size_t n_contents, double window_hours);

    [[nodiscard]] std::optional<double> estimate(ContentIndex content) const override {
        return static_cast<double>(counts_.at(content));
    }
    void refresh(std::size_t window) override;

private:
    std::span<const Request> trace_;
    std::vector<std::uint32_t> counts_;
    std::vector<ContentIndex> touched_;
    double window_seconds_;
};

/// Snapshot of the evolving network's predictions for every known content,
/// in shifted-popularity units clamped at zero.
class LearnedPredictor final : public PredictorHandle {
public:
    LearnedPredictor(FeatureDatabase& features, const Network& network, std::size_t n_contents,
                     std::size_t chunk_rows = 1024);

    [[nodiscard]] std::optional<double> estimate(ContentIndex content) const override {
        return snapshot_.at(content);
    }
    void refresh(std::size_t window) override;

private:
    FeatureDatabase* features_;
    const Network* network_;
    std::vector<std::optional<double>> snapshot_;
    std::size_t chunk_rows_;
};

}  // namespace pacache
