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

#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "pacache/policies.hpp"
#include "pacache/predictors.hpp"
#include "pacache/trace.hpp"

using namespace pacache;

namespace {

const Trace& workload() {
    static const Trace t = [] {
        SyntheticTraceConfig c;
        c.n_requests = 100000;
        return generate_zipf_trace(c);
    }();
    return t;
}

template <class MakePolicy>
void replay(benchmark::State& state, MakePolicy make) {
    const Trace& t = workload();
    for (auto _ : state) {
        auto policy = make(static_cast<std::size_t>(state.range(0)));
        std::size_t hits = 0;
        for (const Request& r : t.requests) hits += policy->on_request(r.content, r.timestamp).hit;
        benchmark::DoNotOptimize(hits);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.requests.size()));
}

void BM_Lru(benchmark::State& s) {
    replay(s, [](std::size_t c) { return std::make_unique<LruPolicy>(c); });
}
void BM_Lfu(benchmark::State& s) {
    replay(s, [](std::size_t c) { return std::make_unique<LfuPolicy>(c); });
}
void BM_Lecar(benchmark::State& s) {
    replay(s, [](std::size_t c) { return std::make_unique<LecarPolicy>(c, LecarOptions{.seed = 1}); });
}
void BM_Belady(benchmark::State& s) {
    const auto index = std::make_shared<const NextUseIndex>(belady_build(workload().requests));
    replay(s, [&](std::size_t c) { return std::make_unique<BeladyPolicy>(c, index); });
}
void BM_Pa(benchmark::State& s) {
    TablePredictor est(workload().catalog.size());
    for (ContentIndex c = 0; c < workload().catalog.size(); ++c) est.set(c, static_cast<double>(c % 97));
    replay(s, [&](std::size_t c) { return std::make_unique<PaPolicy>(c, est); });
}

}  // namespace

BENCHMARK(BM_Lru)->Arg(100)->Arg(1000);
BENCHMARK(BM_Lfu)->Arg(100)->Arg(1000);
BENCHMARK(BM_Lecar)->Arg(100)->Arg(1000);
BENCHMARK(BM_Belady)->Arg(100)->Arg(1000);
BENCHMARK(BM_Pa)->Arg(100)->Arg(1000);
