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

#include "pacache/predictors.hpp"

#include <algorithm>
#include <cmath>

namespace pacache {

OraclePredictor::OraclePredictor(std::span<const Request> trace, std::size_t n_contents, double window_hours)
    : trace_(trace), counts_(n_contents, 0), window_seconds_(window_hours * kSecondsPerHour) {
    if (!(window_hours > 0.0)) throw std::invalid_argument("window_hours must be positive");
}

void OraclePredictor::refresh(std::size_t window) {
    for (ContentIndex c : touched_) counts_[c] = 0;
    touched_.clear();
    const double lo = static_cast<double>(window) * window_seconds_;
    const double hi = static_cast<double>(window + 1) * window_seconds_;
    auto first = std::partition_point(trace_.begin(), trace_.end(),
                                      [lo](const Request& r) { return r.timestamp < lo; });
    for (auto it = first; it != trace_.end() && it->timestamp < hi; ++it) {
        if (counts_[it->content]++ == 0) touched_.push_back(it->content);
    }
}

LearnedPredictor::LearnedPredictor(FeatureDatabase& features, const Network& network, std::size_t n_contents,
                                   std::size_t chunk_rows)
    : features_(&features), network_(&network), snapshot_(n_contents), chunk_rows_(std::max<std::size_t>(1, chunk_rows)) {}

void LearnedPredictor::refresh(std::size_t) {
    const auto serving = features_->serving_features();
    const auto n = static_cast<Eigen::Index>(serving.ids.size());
    for (Eigen::Index begin = 0; begin < n; begin += static_cast<Eigen::Index>(chunk_rows_)) {
        const Eigen::Index rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(chunk_rows_), n - begin);
        const Eigen::VectorXd yhat = predict(*network_, serving.x.middleRows(begin, rows));
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double v = yhat[i];
            snapshot_[serving.ids[static_cast<std::size_t>(begin + i)]] = std::isfinite(v) ? std::max(v, 0.0) : 0.0;
        }
    }
}

}  // namespace pacache
