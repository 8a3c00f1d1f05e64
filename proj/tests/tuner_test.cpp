// Copyright 2026 The mpsbench Authors
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
#include <gtest/gtest.h>

#include "mpsbench/tuner.hpp"

namespace mpsbench {
namespace {

BenchmarkRecord with_status(Status s, double run_time, double fid) {
    BenchmarkRecord r;
    r.status = s;
    r.run_time_seconds = run_time;
    r.mirror_fidelity = fid;
    r.deadline = 300.0;
    r.fidelity_min = 0.99;
    return r;
}

TuneOptions small_budget(std::size_t n, double deadline) {
    TuneOptions o;
    o.n_tune = n;
    o.protocol.deadline = deadline;
    o.protocol.reps = 2;
    o.protocol.shots = 200;
    o.cmaes.population = 6;
    o.cmaes.max_generations = 3;
    o.cmaes.seed = 7;
    return o;
}

TEST(TuningCost, FeasibleIsRunTime) {
    EXPECT_DOUBLE_EQ(tuning_cost(with_status(Status::Ok, 1.25, 1.0)), 1.25);
}

TEST(TuningCost, PenaltyGrowsWithDeficit) {
    const double low = tuning_cost(with_status(Status::LowFidelity, 0.1, 0.9));
    const double lower = tuning_cost(with_status(Status::LowFidelity, 0.1, 0.5));
    EXPECT_DOUBLE_EQ(low, 300.0 + 300.0 * (0.99 - 0.9));
    EXPECT_GT(lower, low);
    EXPECT_DOUBLE_EQ(tuning_cost(with_status(Status::Timeout, 300.0, 1.0)), 300.0 + 300.0 * 0.99);
    EXPECT_DOUBLE_EQ(tuning_cost(with_status(Status::Crash, 0.0, 1.0)), 300.0 + 300.0 * 0.99);
    EXPECT_GT(tuning_cost(with_status(Status::LowFidelity, 0.1, 0.989999)),
              tuning_cost(with_status(Status::Ok, 299.0, 1.0)));
}

TEST(ConfigFromPoint, MatchesByName) {
    const ParamSpace s = default_space();
    EXPECT_EQ(s.cardinality(), 11u * 10u * 8u);
    MpsConfig base;
    base.rng_seed = 17;
    const MpsConfig c = config_from_point({3, 5, 1, 0, 1}, s, base);
    EXPECT_EQ(c.bond_dimension, 32u);
    EXPECT_DOUBLE_EQ(c.cutoff, 1e-5);
    EXPECT_TRUE(c.fuse);
    EXPECT_FALSE(c.permute);
    EXPECT_TRUE(c.swap_split);
    EXPECT_EQ(c.rng_seed, 17u);

    const ParamSpace only_chi{{Dimension::ordinal("bond_dimension", {2, 4})}};
    base.cutoff = 0.0;
    EXPECT_EQ(config_from_point({1}, only_chi, base).cutoff, 0.0);
    const ParamSpace bad{{Dimension::boolean("turbo")}};
    EXPECT_THROW(config_from_point({0}, bad), std::invalid_argument);
}

TEST(Tune, GhzIsFeasible) {
    TuneOptions o = small_budget(32, 30.0);
    std::size_t sunk = 0;
    const TuneResult r = tune("ghz", default_space(), o, make_provider(1), [&](const BenchmarkRecord &) { ++sunk; });
    EXPECT_TRUE(r.feasible) << r.record.error;
    EXPECT_FALSE(r.fell_back);
    EXPECT_EQ(r.n_tuned, 32u);
    ASSERT_TRUE(r.probe_record.has_value());
    EXPECT_EQ(r.record.repetitions, 2u);
    EXPECT_EQ(r.record.config, r.best);
    EXPECT_EQ(sunk, r.search.evaluations + 2);
    EXPECT_LE(r.search_cost, o.protocol.deadline);
}

TEST(Tune, RandomFallsBackToSmallSize) {
    TuneOptions o = small_budget(100, 1.0);
    const TuneResult r = tune("random", default_space(), o, make_provider(1));
    ASSERT_TRUE(r.probe_record.has_value());
    EXPECT_EQ(r.probe_record->status, Status::Timeout);
    EXPECT_TRUE(r.fell_back);
    EXPECT_EQ(r.n_tuned, 10u);
    EXPECT_TRUE(r.feasible) << status_name(r.record.status);
    EXPECT_EQ(r.record.n_qubits, 10u);
}

TEST(Tune, OtherClassesFallBackTo24) {
    TuneOptions o = small_budget(400, 0.002);
    o.cmaes.max_generations = 1;
    o.cmaes.population = 4;
    const TuneResult r = tune("su2rand", default_space(), o, make_provider(1));
    EXPECT_TRUE(r.fell_back);
    EXPECT_EQ(r.n_tuned, 24u);
}

TEST(Tune, WithoutProbe) {
    TuneOptions o = small_budget(12, 30.0);
    o.probe = false;
    const TuneResult r = tune("qft", default_space(), o, make_provider(1));
    EXPECT_FALSE(r.probe_record.has_value());
    EXPECT_EQ(r.n_tuned, 12u);
    EXPECT_TRUE(r.feasible);
}

TEST(GridSearch, FindsTheCheapestCell) {
    const ParamSpace s{{Dimension::ordinal("bond_dimension", {1, 2, 4}), Dimension::boolean("fuse")}};
    Protocol p;
    p.reps = 1;
    p.shots = 100;
    p.deadline = 30.0;
    const GridSearchResult g = grid_search("ghz", 8, s, p, make_provider(1));
    ASSERT_EQ(g.all.size(), 6u);
    double best = 1e300;
    for (const auto &[cfg, rec] : g.all) {
        best = std::min(best, tuning_cost(rec));
        if (cfg.bond_dimension == 1) {
            EXPECT_EQ(rec.status, Status::LowFidelity);
        } else {
            EXPECT_EQ(rec.status, Status::Ok);
        }
    }
    EXPECT_EQ(g.best_cost, best);
    EXPECT_GE(g.best.bond_dimension, 2u);
    EXPECT_THROW(grid_search("ghz", 8, ParamSpace{{Dimension::continuous("x")}}, p, make_provider(1)),
                 std::invalid_argument);
}

} // namespace
} // namespace mpsbench
