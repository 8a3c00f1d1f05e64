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
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. Long: the random-24 sweep alone can take
// most of an hour on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpsbench/mpsbench.hpp"
#include "test_util.hpp"

namespace {

using namespace mpsbench;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::vector<BenchmarkRecord> g_records; // everything produced along the way

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

MpsConfig exact_config() {
    MpsConfig c;
    c.bond_dimension = 4096;
    c.cutoff = 0.0;
    return c;
}

MpsConfig chi_config(std::size_t chi) {
    MpsConfig c;
    c.bond_dimension = chi;
    return c;
}

BenchmarkRecord bench(const std::string &cls, std::size_t n, const MpsConfig &cfg, Protocol p = {}) {
    EngineSpec e;
    e.config = cfg;
    BenchmarkRecord r = run_benchmark(cls, n, e, p, make_provider(1));
    g_records.push_back(r);
    return r;
}

std::string describe(const BenchmarkRecord &r) {
    return fmt("%s n=%zu chi=%zu %s F=%.3f t=%.3gs", r.class_name.c_str(), r.n_qubits, r.config.bond_dimension,
               std::string(status_name(r.status)).c_str(), r.mirror_fidelity, r.run_time_seconds);
}

const std::vector<std::size_t> kSmall = {4, 6, 8, 10, 12};

Verdict oracle_equivalence() {
    const auto t0 = Clock::now();
    double worst = -1.0;
    std::string where;
    for (CircuitClass cls : kNativeClasses) {
        for (std::size_t n : kSmall) {
            const Circuit c = strip_measures(generate(cls, n, 7));
            RunResult r = run(c, exact_config(), 0, 600.0, true);
            const StateVector got = r.state->to_statevector();
            const StateVector want = sv_run(c);
            const auto &mps = got.amplitudes();
            const auto &ref = want.amplitudes();
            if (mps.size() != ref.size()) {
                return {false, fmt("size mismatch at n=%zu", n)};
            }
            for (std::size_t i = 0; i < ref.size(); ++i) {
                const double d = std::abs(mps[i] - ref[i]);
                if (d > worst) {
                    worst = d;
                    where = fmt("%s n=%zu", std::string(class_name(cls)).c_str(), n);
                }
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-8 && t < 60.0, fmt("max |amp diff| %.2e (%s), %.1fs total", worst, where.c_str(), t)};
}

Verdict mirror_identity() {
    std::size_t runs = 0;
    std::vector<std::string> bad;
    Protocol p;
    p.reps = 1;
    for (CircuitClass cls : kNativeClasses) {
        for (std::size_t n = min_qubits(cls); n <= 12; ++n) {
            const BenchmarkRecord r = bench(std::string(class_name(cls)), n, exact_config(), p);
            ++runs;
            if (r.status != Status::Ok || r.mirror_fidelity != 1.0) {
                bad.push_back(describe(r));
            }
        }
    }
    return {bad.empty(), fmt("%zu/%zu runs returned 1000/1000 zeros%s%s", runs - bad.size(), runs,
                             bad.empty() ? "" : "; first failure: ", bad.empty() ? "" : bad.front().c_str())};
}

Verdict easy_at_scale() {
    bool ok = true;
    std::string detail;
    for (const char *cls : {"ghz", "wstate"}) {
        const BenchmarkRecord r = bench(cls, 1024, chi_config(4));
        ok = ok && r.status == Status::Ok;
        detail += (detail.empty() ? "" : "; ") + describe(r);
    }
    return {ok, detail};
}

Verdict qft_at_scale() {
    bool ok = true;
    std::string detail;
    for (const char *cls : {"qft", "qftentangled"}) {
        BenchmarkRecord r;
        for (std::size_t chi : {4, 8}) {
            r = bench(cls, 100, chi_config(chi));
            if (r.status == Status::Ok) {
                break;
            }
        }
        ok = ok && r.status == Status::Ok;
        detail += (detail.empty() ? "" : "; ") + describe(r);
    }
    return {ok, detail};
}

Verdict realamp_medium() {
    Protocol p;
    p.reps = 1;
    std::string detail;
    for (std::size_t chi : {16, 32, 64}) {
        const BenchmarkRecord r = bench("realamp", 24, chi_config(chi), p);
        detail += (detail.empty() ? "" : "; ") + describe(r);
        if (r.status == Status::Ok && r.mirror_fidelity >= 0.99) {
            return {true, detail};
        }
    }
    return {false, detail};
}

Verdict random_is_hard() {
    Protocol p;
    p.reps = 1;
    std::size_t failed = 0;
    std::string detail;
    const Dimension chis = default_space().dims[0];
    for (double chi : chis.values) {
        const BenchmarkRecord r = bench("random", 24, chi_config(static_cast<std::size_t>(chi)), p);
        failed += r.status == Status::Ok ? 0 : 1;
        std::fprintf(stderr, "  random24 %s\n", describe(r).c_str());
    }
    detail = fmt("random24 failed at %zu/%zu grid points", failed, chis.values.size());
    const BenchmarkRecord small = bench("random", 10, exact_config(), p);
    detail += "; " + describe(small);
    return {failed == chis.values.size() && small.status == Status::Ok && small.mirror_fidelity == 1.0, detail};
}

double slope_of(const std::string &cls, std::size_t chi, std::size_t lo, std::size_t hi, std::string &bad) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t n : qubit_grid(lo, hi)) {
        const BenchmarkRecord r = bench(cls, n, chi_config(chi));
        if (r.status != Status::Ok) {
            bad = describe(r);
        }
        x.push_back(static_cast<double>(n));
        y.push_back(r.run_time_seconds); // min of 4 repetitions
    }
    return loglog_slope(x, y);
}

Verdict scaling_slopes() {
    std::string bad;
    const double w = slope_of("wstate", 4, 64, 1024, bad);
    const double q = slope_of("qft", 4, 32, 256, bad);
    return {bad.empty() && w <= 1.5 && q <= 3.0,
            fmt("wstate slope %.3f (<= 1.5), qft slope %.3f (<= 3.0)%s%s", w, q, bad.empty() ? "" : "; not ok: ",
                bad.c_str())};
}

Verdict elo_math() {
    const double e0 = expected_score(1200, 1200);
    const double e200 = expected_score(1400, 1200);
    const auto [a, b] = elo_update(1200, 1200, true, 32);
    std::mt19937_64 gen(11);
    std::vector<double> r(16, kInitialRating);
    std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
    for (int i = 0; i < 1000000; ++i) {
        const std::size_t x = pick(gen);
        std::size_t y = pick(gen);
        while (y == x) {
            y = pick(gen);
        }
        std::tie(r[x], r[y]) = elo_update(r[x], r[y], gen() & 1);
    }
    double sum = 0.0;
    for (double v : r) {
        sum += v;
    }
    const double drift = std::abs(sum - kInitialRating * static_cast<double>(r.size()));
    const bool ok = e0 == 0.5 && std::abs(e200 - 0.7597) <= 1e-4 && a == 1216.0 && b == 1184.0 && drift <= 1e-6;
    return {ok, fmt("E(=)=%.6f E(+200)=%.6f update=(%g,%g) drift after 1e6 games %.2e", e0, e200, a, b, drift)};
}

Verdict tournament_consistency() {
    // Engine i solves up to 100 - 10 i qubits on every class; ties in size are
    // impossible, so the dominance order is strict.
    std::vector<BenchmarkRecord> recs;
    for (int e = 0; e < 5; ++e) {
        for (int c = 0; c < 6; ++c) {
            for (std::size_t n : {20u, 50u, 100u - 10u * static_cast<unsigned>(e)}) {
                BenchmarkRecord r;
                r.class_name = "c" + std::to_string(c);
                r.engine = "e" + std::to_string(e);
                r.n_qubits = n;
                r.status = Status::Ok;
                r.run_time_seconds = 0.1 * static_cast<double>(n) + 0.01 * e;
                recs.push_back(r);
            }
        }
    }
    const EloTable t = tournament(recs, {}, 20000, 5);
    const EloTable again = tournament(recs, {}, 20000, 5);
    bool ordered = true;
    bool consistent = true;
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        if (i + 1 < t.engines.size() && !(t.mean[i] > t.mean[i + 1])) {
            ordered = false;
        }
        for (std::size_t j = 0; j < t.engines.size(); ++j) {
            if (t.mean[i] > t.mean[j] && !(t.win_rate[i][j] > 0.5)) {
                consistent = false;
            }
        }
    }
    const bool same = t.mean == again.mean && t.stddev == again.stddev;
    std::string means;
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        means += fmt("%s%s=%.1f", i ? " " : "", t.engines[i].c_str(), t.mean[i]);
    }
    return {ordered && consistent && same,
            means + fmt("; ordered=%d consistent=%d deterministic=%d", ordered, consistent, same)};
}

Verdict tuner_quality() {
    ParamSpace sub;
    sub.dims.push_back(Dimension::ordinal("bond_dimension", {4, 8, 16, 32, 64, 128}));
    sub.dims.push_back(Dimension::ordinal("cutoff", {1e-10, 1e-6}));
    sub.dims.push_back(Dimension::boolean("fuse"));
    Protocol p;
    const CircuitProvider prov = make_provider(1);

    const GridSearchResult grid = grid_search("qft", 24, sub, p, prov);
    double grid_time = 0.0;
    for (const auto &[cfg, rec] : grid.all) {
        g_records.push_back(rec);
        if (cfg == grid.best) {
            grid_time = rec.run_time_seconds;
        }
    }
    TuneOptions opts;
    opts.protocol = p;
    opts.n_tune = 24;
    opts.probe = false;
    opts.cmaes.sigma0 = 2.0;
    opts.cmaes.seed = 3;
    const TuneResult tuned = tune("qft", sub, opts, prov, [](const BenchmarkRecord &r) { g_records.push_back(r); });
    const double tune_time = tuned.record.run_time_seconds;
    const bool within = tuned.feasible && tune_time <= 2.0 * grid_time;

    // Sphere in five continuous dimensions with a 200-evaluation budget.
    ParamSpace sphere;
    for (int i = 0; i < 5; ++i) {
        sphere.dims.push_back(Dimension::continuous("x" + std::to_string(i)));
    }
    auto f = [](const std::vector<double> &x) {
        double s = 0.0;
        for (double v : x) {
            s += v * v;
        }
        return s;
    };
    std::size_t sphere_ok = 0;
    double worst_sphere = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed + 100);
        std::vector<double> x0(5);
        for (double &v : x0) {
            v = rng.uniform(-1, 1);
        }
        CmaesConfig cfg;
        cfg.population = 8;
        cfg.seed = seed;
        cfg.sigma0 = 0.5;
        cfg.max_generations = 1000;
        cfg.max_evaluations = 200;
        cfg.target = 1e-6;
        const CmaesResult r = cmaes_minimize(f, sphere, cfg, x0);
        sphere_ok += r.best_cost < 1e-6 ? 1 : 0;
        worst_sphere = std::max(worst_sphere, r.best_cost);
    }

    // Positive definiteness over every generation of the tuner search and of
    // a longer mixed-integer run on the full default space.
    double min_eig = std::numeric_limits<double>::infinity();
    for (const GenerationLog &g : tuned.search.trace) {
        min_eig = std::min(min_eig, g.min_eigenvalue);
    }
    ParamSpace mixed = default_space();
    mixed.dims.push_back(Dimension::continuous("x"));
    CmaesConfig mc;
    mc.max_generations = 300;
    mc.cache = false;
    mc.seed = 9;
    const CmaesResult mr = cmaes_minimize(
        [](const std::vector<double> &p) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                s += (p[i] - 1.0) * (p[i] - 1.0);
            }
            return s;
        },
        mixed, mc);
    for (const GenerationLog &g : mr.trace) {
        min_eig = std::min(min_eig, g.min_eigenvalue);
    }
    const bool pd = min_eig > 0.0;

    return {within && sphere_ok == 10 && pd,
            fmt("tuned %.4gs vs grid %.4gs (ratio %.2f, %zu evals); sphere < 1e-6 within 200 evals in %zu/10 runs "
                "(worst %.2e); min eigenvalue %.2e",
                tune_time, grid_time, grid_time > 0 ? tune_time / grid_time : 0.0, tuned.search.evaluations,
                sphere_ok, worst_sphere, min_eig)};
}

Verdict sanitizer() {
    double worst = 1.0;
    bool in_range = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Circuit c = testing::random_circuit(8, 120, seed, true);
        const Circuit s = sanitize(c);
        worst = std::min(worst, testing::overlap_fidelity(testing::reference_state(c), testing::reference_state(s)));
        for (const Gate &g : s.gates) {
            if (g.kind != GateKind::U) {
                continue;
            }
            for (double a : g.params) {
                in_range = in_range && a >= 0.0 && a < 4 * std::numbers::pi;
            }
        }
    }
    return {worst >= 1.0 - 1e-9 && in_range, fmt("worst fidelity 1 - %.2e, angles in [0, 4pi): %d", 1.0 - worst,
                                                 in_range)};
}

Verdict round_trips() {
    std::size_t circuits = 0;
    std::size_t qasm_bad = 0;
    for (CircuitClass cls : kNativeClasses) {
        for (std::size_t n : qubit_grid(4, 128)) {
            const Circuit c = generate(cls, n, 2);
            for (const Circuit &x : {c, mirror(c), strip_measures(c)}) {
                ++circuits;
                qasm_bad += parse_qasm(serialize_qasm(x)) == x ? 0 : 1;
            }
        }
    }
    const std::vector<BenchmarkRecord> back = load_records_text(persist(g_records));
    const bool json_ok = back == g_records;
    return {qasm_bad == 0 && json_ok && !g_records.empty(),
            fmt("qasm %zu/%zu circuits lossless; %zu records %s through JSONL", circuits - qasm_bad, circuits,
                g_records.size(), json_ok ? "lossless" : "CHANGED")};
}

} // namespace

// Optional arguments select criteria by number, e.g. `acceptance 1 12`.
int main(int argc, char **argv) {
    struct Item {
        int id;
        const char *name;
        std::function<Verdict()> check;
    };
    const std::vector<Item> items = {
        {8, "elo math", elo_math},
        {9, "tournament consistency", tournament_consistency},
        {11, "sanitizer", sanitizer},
        {1, "oracle equivalence", oracle_equivalence},
        {2, "mirror identity", mirror_identity},
        {3, "ghz/wstate at 1024", easy_at_scale},
        {4, "qft family at 100", qft_at_scale},
        {5, "realamp at 24", realamp_medium},
        {7, "scaling slopes", scaling_slopes},
        {10, "tuner", tuner_quality},
        {6, "random is hard", random_is_hard},
        {12, "round trips", round_trips},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        only.push_back(std::atoi(argv[i]));
    }
    int failures = 0;
    std::size_t ran = 0;
    for (const Item &it : items) {
        if (!only.empty() && std::find(only.begin(), only.end(), it.id) == only.end()) {
            continue;
        }
        ++ran;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = it.check();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("[%2d] %s  %-24s %s (%.1fs)\n", it.id, v.pass ? "PASS" : "FAIL", it.name, v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
