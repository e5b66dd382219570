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
#include "doctest.h"

using namespace pacache;
using nlohmann::json;

TEST_CASE("config round trip") {
    cli::ExperimentConfig c;
    c.sim.policy = "lecar";
    c.sim.network.hyper.eta = 0.25;
    c.synthetic.zipf_alpha = 1.1;
    c.sweep_seeds = {4, 5};
    c.jobs = 3;
    const auto doc = cli::to_json(c);
    const cli::ExperimentConfig back = cli::from_json(json::parse(doc.dump()));
    CHECK(cli::to_json(back).dump() == doc.dump());
    CHECK(back.sim.policy == "lecar");
    CHECK(back.sim.network.hyper.eta == 0.25);
    CHECK(back.sweep_seeds == std::vector<std::uint64_t>{4, 5});
}

TEST_CASE("config overlays only the given keys") {
    const auto c = cli::from_json(json::parse(R"({"simulation": {"cache_percentage": 2.5}})"));
    CHECK(c.sim.cache_percentage == 2.5);
    CHECK(c.sim.window_hours == 1.0);
    CHECK(c.sim.network.depth == 10);
}

TEST_CASE("config rejects unknown keys and sections") {
    CHECK_THROWS_WITH_AS((void)cli::from_json(json::parse(R"({"simulation": {"cache_pct": 1}})")),
                         doctest::Contains("cache_pct"), std::invalid_argument);
    CHECK_THROWS_WITH_AS((void)cli::from_json(json::parse(R"({"extras": {}})")), doctest::Contains("extras"),
                         std::invalid_argument);
    CHECK_THROWS_AS((void)cli::from_json(json::parse(R"({"network": {"depth": "ten"}})")), std::invalid_argument);
}
