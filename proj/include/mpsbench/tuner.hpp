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
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpsbench/cmaes.hpp"
#include "mpsbench/harness.hpp"
#include "mpsbench/mps.hpp"

namespace mpsbench {

/// The MPS tuning space: bond dimension and cutoff grids plus three flags.
inline ParamSpace default_space() {
    ParamSpace s;
    s.dims.push_back(Dimension::ordinal("bond_dimension", {4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 3072}));
    s.dims.push_back(
        Dimension::ordinal("cutoff", {1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}));
    s.dims.push_back(Dimension::boolean("fuse"));
    s.dims.push_back(Dimension::boolean("permute"));
    s.dims.push_back(Dimension::boolean("swap_split"));
    return s;
}

/// Builds an MpsConfig from a discretized point. Dimensions are matched by
/// name; fields without a dimension keep the values of `base`.
inline MpsConfig config_from_point(const std::vector<double> &point, const ParamSpace &space,
                                   const MpsConfig &base = {}) {
    MpsConfig c = base;
    for (std::size_t j = 0; j < space.dimension(); ++j) {
        const std::string &name = space.dims[j].name;
        const double v = space.value(point, j);
        if (name == "bond_dimension") {
            c.bond_dimension = static_cast<std::size_t>(v);
        } else if (name == "cutoff") {
            c.cutoff = v;
        } else if (name == "fuse") {
            c.fuse = v != 0.0;
        } else if (name == "permute") {
            c.permute = v != 0.0;
        } else if (name == "swap_split") {
            c.swap_split = v != 0.0;
        } else {
            throw std::invalid_argument("config_from_point: unknown dimension '" + name + "'");
        }
    }
    c.validate();
    return c;
}

/// Run time when the record is ok; otherwise the deadline plus a penalty
/// growing with the fidelity deficit, so every infeasible cost exceeds every
/// feasible one. Timeouts and crashes count as fidelity 0.
inline double tuning_cost(const BenchmarkRecord &r) {
    if (r.status == Status::Ok) {
        return r.run_time_seconds;
    }
    const double fid = r.status == Status::LowFidelity ? r.mirror_fidelity : 0.0;
    return r.deadline + r.deadline * std::max(0.0, r.fidelity_min - fid);
}

struct TuneOptions {
    Protocol protocol;             ///< full protocol, used for the final re-validation
    std::size_t n_tune = 100;
    std::size_t n_fallback = 24;
    std::size_t n_fallback_random = 10;
    bool probe = true;             ///< false: tune directly at n_tune
    CmaesConfig cmaes;
    MpsConfig base;                ///< values for fields the space does not cover

    TuneOptions() { cmaes.sigma0 = 2.0; }
};

struct TuneResult {
    MpsConfig best;
    BenchmarkRecord record;        ///< full-protocol re-validation of `best`
    bool feasible = false;
    std::size_t n_tuned = 0;
    bool fell_back = false;
    std::optional<BenchmarkRecord> probe_record;
    double search_cost = 0.0;      ///< best single-repetition cost seen during the search
    CmaesResult search;
};

/// Searches the space with CMA-ES for the config of least fidelity-constrained
/// run time on one class.
///
/// The centre of the space is first probed at `n_tune`; if it times out the
/// search moves to the fallback size (smaller for random). Search evaluations
/// use one repetition each; the winner is re-run under the full protocol.
inline TuneResult tune(const std::string &cls, const ParamSpace &space, const TuneOptions &opts,
                       const CircuitProvider &provider,
                       const std::function<void(const BenchmarkRecord &)> &sink = {}) {
    space.validate();
    TuneResult out;
    Protocol quick = opts.protocol;
    quick.reps = 1;

    std::size_t n = opts.n_tune;
    if (opts.probe) {
        std::vector<double> centre(space.dimension());
        for (std::size_t j = 0; j < space.dimension(); ++j) {
            const Dimension &d = space.dims[j];
            centre[j] = d.discrete() ? 0.5 * static_cast<double>(d.size() - 1) : 0.0;
        }
        EngineSpec probe_engine;
        probe_engine.config = config_from_point(discretize(centre, space), space, opts.base);
        BenchmarkRecord probe = run_benchmark(cls, n, probe_engine, quick, provider);
        if (sink) {
            sink(probe);
        }
        if (probe.status == Status::Timeout) {
            n = cls == "random" ? opts.n_fallback_random : opts.n_fallback;
            out.fell_back = true;
        }
        out.probe_record = std::move(probe);
    }
    out.n_tuned = n;

    std::map<std::vector<double>, BenchmarkRecord> seen;
    auto objective = [&](const std::vector<double> &point) {
        EngineSpec engine;
        engine.config = config_from_point(point, space, opts.base);
        BenchmarkRecord rec = run_benchmark(cls, n, engine, quick, provider);
        if (sink) {
            sink(rec);
        }
        const double cost = tuning_cost(rec);
        seen.insert_or_assign(point, std::move(rec));
        return cost;
    };
    out.search = cmaes_minimize(objective, space, opts.cmaes);
    out.search_cost = out.search.best_cost;

    EngineSpec winner;
    winner.config = config_from_point(out.search.best_point, space, opts.base);
    out.best = winner.config;
    out.record = run_benchmark(cls, n, winner, opts.protocol, provider);
    if (sink) {
        sink(out.record);
    }
    out.feasible = out.record.status == Status::Ok;
    return out;
}

/// Exhaustive search over a fully discrete space with the same cost; the
/// reference the CMA-ES result is compared against.
struct GridSearchResult {
    MpsConfig best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::pair<MpsConfig, BenchmarkRecord>> all;
};

inline GridSearchResult grid_search(const std::string &cls, std::size_t n, const ParamSpace &space,
                                    const Protocol &protocol, const CircuitProvider &provider,
                                    const MpsConfig &base = {}) {
    space.validate();
    if (space.cardinality() == 0) {
        throw std::invalid_argument("grid_search: space has a continuous dimension");
    }
    GridSearchResult out;
    std::vector<std::size_t> idx(space.dimension(), 0);
    for (;;) {
        std::vector<double> point(idx.begin(), idx.end());
        EngineSpec engine;
        engine.config = config_from_point(point, space, base);
        BenchmarkRecord rec = run_benchmark(cls, n, engine, protocol, provider);
        const double cost = tuning_cost(rec);
        if (cost < out.best_cost) {
            out.best_cost = cost;
            out.best = engine.config;
        }
        out.all.emplace_back(engine.config, std::move(rec));
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == space.dims[j].size()) {
            idx[j] = 0;
            ++j;
        }
        if (j == idx.size()) {
            break;
        }
    }
    return out;
}

} // namespace mpsbench
