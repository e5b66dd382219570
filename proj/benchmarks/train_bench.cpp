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

#include <algorithm>

#include <benchmark/benchmark.h>

#include "pacache/evonet.hpp"
#include "pacache/random.hpp"

using namespace pacache;

namespace {

TrainingBatch batch(std::size_t m, std::size_t d) {
    Rng rng(1);
    TrainingBatch b;
    b.x.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    b.y.resize(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < b.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.x.cols(); ++j) b.x(i, j) = uniform01(rng);
        b.y[i] = 1.0 + 10.0 * uniform01(rng);
    }
    return b;
}

// range(0) = first width; depth 10 tapering to 16 (or the first width if smaller)
void BM_TrainStep(benchmark::State& state) {
    const std::size_t d = 240;
    const auto first = static_cast<std::size_t>(state.range(0));
    const auto widths = geometric_widths(10, first, std::min<std::size_t>(16, first));
    Hyperparameters hp;
    hp.eta = 0.01;
    Network net(d, widths, hp, 1);
    const TrainingBatch b = batch(128, d);
    for (auto _ : state) benchmark::DoNotOptimize(train_step(net, b).combined_loss);
}

void BM_Predict(benchmark::State& state) {
    const std::size_t d = 240;
    const auto first = static_cast<std::size_t>(state.range(0));
    const Network net(d, geometric_widths(10, first, std::min<std::size_t>(16, first)), {}, 1);
    const TrainingBatch b = batch(1024, d);
    for (auto _ : state) benchmark::DoNotOptimize(predict(net, b.x));
    state.SetItemsProcessed(state.iterations() * 1024);
}

}  // namespace

BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Predict)->Arg(32)->Arg(512)->Unit(benchmark::kMillisecond);
