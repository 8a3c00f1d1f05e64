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
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "mpsbench/harness.hpp"

namespace mpsbench {
namespace {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("mpsbench_harness_" + std::to_string(std::random_device{}()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path &path() const { return path_; }

  private:
    fs::path path_;
    static inline int counter_ = 0;
};

Protocol quick(std::size_t reps = 2) {
    Protocol p;
    p.reps = reps;
    p.deadline = 60.0;
    return p;
}

BenchmarkRecord sample_record(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BenchmarkRecord r;
    r.class_name = seed % 2 ? "qft" : "qnn";
    r.n_qubits = 4 + seed;
    r.config.bond_dimension = 1 + seed * 7;
    r.config.cutoff = u(gen) * 1e-3;
    r.config.fuse = seed % 3 == 0;
    r.config.permute = seed % 5 == 0;
    r.config.swap_split = seed % 2 == 0;
    r.config.rng_seed = gen();
    r.engine = engine_id(r.config);
    r.per_repetition_times = {u(gen), u(gen), u(gen) * 1e-9};
    r.run_time_seconds = *std::min_element(r.per_repetition_times.begin(), r.per_repetition_times.end());
    r.mirror_fidelity = u(gen);
    if (seed % 2) {
        r.mirror_exact_probability = u(gen);
        r.circuit_seed = gen();
    }
    r.forward_sample_digest = "0123456789abcdef";
    r.status = static_cast<Status>(seed % 4);
    r.shots = 1000;
    r.repetitions = 3;
    r.deadline = 300.0;
    r.fidelity_min = 0.99;
    r.fidelity_estimate = u(gen);
    r.peak_bond = seed;
    r.error = seed % 4 == 3 ? "boom \"quoted\"\nnewline" : "";
    r.timestamp = "2026-01-01T00:00:00Z";
    r.host = "test-host";
    return r;
}

TEST(Classify, Precedence) {
    EXPECT_EQ(classify(true, 1.0, 0.99), Status::Timeout);
    EXPECT_EQ(classify(true, 0.0, 0.99), Status::Timeout);
    EXPECT_EQ(classify(false, 0.5, 0.99), Status::LowFidelity);
    EXPECT_EQ(classify(false, 0.99, 0.99), Status::Ok);
    for (Status s : {Status::Ok, Status::Timeout, Status::LowFidelity, Status::Crash}) {
        EXPECT_EQ(parse_status(status_name(s)), s);
    }
    EXPECT_THROW(parse_status("fine"), std::invalid_argument);
}

TEST(EngineId, IgnoresSamplingSeed) {
    MpsConfig a;
    MpsConfig b = a;
    b.rng_seed = 99;
    EXPECT_EQ(engine_id(a), engine_id(b));
    b.bond_dimension = 8;
    EXPECT_NE(engine_id(a), engine_id(b));
    EXPECT_EQ(engine_id(a).rfind("mps:", 0), 0u);
    EXPECT_EQ(engine_id(a).size(), 12u);
    EXPECT_EQ(engine_id(EngineSpec{EngineKind::StateVector, a, ""}), "statevector");
    EXPECT_EQ(engine_id(EngineSpec{EngineKind::Mps, a, "mine"}), "mine");
}

TEST(SampleDigest, OrderIndependent) {
    EXPECT_EQ(sample_digest({"01", "10", "01"}), sample_digest({"01", "01", "10"}));
    EXPECT_NE(sample_digest({"01", "10", "01"}), sample_digest({"01", "10", "10"}));
    EXPECT_EQ(sample_digest({}).size(), 16u);
}

TEST(RunBenchmark, GhzHundred) {
    MpsConfig cfg;
    cfg.bond_dimension = 4;
    const BenchmarkRecord r = run_benchmark(CircuitClass::Ghz, 100, cfg, quick());
    EXPECT_EQ(r.status, Status::Ok) << r.error;
    EXPECT_DOUBLE_EQ(r.mirror_fidelity, 1.0);
    ASSERT_TRUE(r.mirror_exact_probability.has_value());
    EXPECT_NEAR(*r.mirror_exact_probability, 1.0, 1e-9);
    EXPECT_EQ(r.n_qubits, 100u);
    EXPECT_EQ(r.class_name, "ghz");
    EXPECT_EQ(r.repetitions, 2u);
    EXPECT_EQ(r.per_repetition_times.size(), 2u);
    EXPECT_GT(r.run_time_seconds, 0.0);
    EXPECT_EQ(r.run_time_seconds, *std::min_element(r.per_repetition_times.begin(), r.per_repetition_times.end()));
    EXPECT_EQ(r.circuit_seed, std::optional<std::uint64_t>(1));
    EXPECT_EQ(r.peak_bond, 2u);
}

TEST(RunBenchmark, RandomAtTinyBondIsLowFidelity) {
    MpsConfig cfg;
    cfg.bond_dimension = 4;
    const BenchmarkRecord r = run_benchmark(CircuitClass::Random, 14, cfg, quick(1));
    EXPECT_EQ(r.status, Status::LowFidelity);
    EXPECT_LT(r.mirror_fidelity, 0.99);
    EXPECT_LT(r.fidelity_estimate, 0.99);
}

TEST(RunBenchmark, ZeroDeadlineTimesOut) {
    Protocol p = quick();
    p.deadline = 0.0;
    const BenchmarkRecord r = run_benchmark(CircuitClass::Ghz, 8, MpsConfig{}, p);
    EXPECT_EQ(r.status, Status::Timeout);
    EXPECT_TRUE(r.per_repetition_times.empty());
    EXPECT_EQ(r.n_qubits, 8u);
}

TEST(RunBenchmark, StatevectorEngine) {
    const BenchmarkRecord r =
        run_benchmark("qft", 10, EngineSpec{EngineKind::StateVector, {}, ""}, quick(), make_provider(1));
    EXPECT_EQ(r.status, Status::Ok) << r.error;
    EXPECT_EQ(r.engine, "statevector");
    EXPECT_DOUBLE_EQ(r.mirror_fidelity, 1.0);
}

TEST(RunBenchmark, DigestDeterministicUnderSeed) {
    EngineSpec mps;
    mps.config.bond_dimension = 64;
    mps.config.rng_seed = 4;
    const auto p = make_provider(2);
    EXPECT_EQ(run_benchmark("wstate", 8, mps, quick(1), p).forward_sample_digest,
              run_benchmark("wstate", 8, mps, quick(1), p).forward_sample_digest);
}

TEST(RunBenchmark, CrashOnBadInput) {
    const BenchmarkRecord bad = run_benchmark_qasm("OPENQASM 2.0; qreg q[2]; h q[0];", "x", EngineSpec{}, quick());
    EXPECT_EQ(bad.status, Status::Crash);
    EXPECT_NE(bad.error.find("unsupported"), std::string::npos);
    const BenchmarkRecord missing = run_benchmark("qnn", 8, EngineSpec{}, quick(), make_provider(1));
    EXPECT_EQ(missing.status, Status::Crash);
    EXPECT_EQ(missing.n_qubits, 8u);
    EngineSpec wrong;
    wrong.config.bond_dimension = 0;
    EXPECT_EQ(run_benchmark("ghz", 4, wrong, quick(), make_provider(1)).status, Status::Crash);
}

TEST(Provider, ReadsQasmFiles) {
    TempDir dir;
    const std::string text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncx q[0],q[2];\n";
    std::ofstream(dir.path() / "qnn_indep_qiskit_3.qasm") << text;
    std::ofstream(dir.path() / "ae_5.qasm") << text;
    const CircuitProvider p = make_provider(1, dir.path());
    EXPECT_EQ(p("qnn", 3), text);
    EXPECT_EQ(p("ae", 5), text);
    EXPECT_FALSE(p("ae", 6).has_value());
    EXPECT_TRUE(p("ghz", 4).has_value());
    EXPECT_FALSE(p("ghz", 1).has_value());
    const BenchmarkRecord r = run_benchmark("qnn", 3, EngineSpec{}, quick(), p);
    EXPECT_EQ(r.status, Status::Ok) << r.error;
    EXPECT_FALSE(r.circuit_seed.has_value());
}

TEST(Persist, RoundTrip) {
    std::vector<BenchmarkRecord> recs;
    for (std::uint64_t s = 0; s < 12; ++s) {
        recs.push_back(sample_record(s));
    }
    EXPECT_EQ(load_records_text(persist(recs)), recs);
    for (const BenchmarkRecord &r : recs) {
        EXPECT_EQ(record_from_json(to_json(r)), r);
    }
}

TEST(Persist, RoundTripOfRealRecords) {
    const BenchmarkRecord r = run_benchmark(CircuitClass::Qft, 8, MpsConfig{}, quick());
    EXPECT_EQ(load_records_text(persist({r})), std::vector<BenchmarkRecord>{r});
    const nlohmann::json j = to_json(r);
    for (const char *key : {"class", "n_qubits", "engine", "config", "run_time_seconds", "per_repetition_times",
                            "mirror_fidelity", "forward_sample_digest", "status", "shots", "repetitions",
                            "deadline", "fidelity_min", "circuit_seed", "schema_version"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
}

TEST(Persist, AppendConcatenates) {
    TempDir dir;
    const fs::path file = dir.path() / "bench.jsonl";
    std::vector<BenchmarkRecord> first{sample_record(1), sample_record(2)};
    std::vector<BenchmarkRecord> second{sample_record(3)};
    append_records(file, first);
    append_records(file, second);
    std::vector<BenchmarkRecord> both = first;
    both.insert(both.end(), second.begin(), second.end());
    EXPECT_EQ(load_records(file), both);
}

TEST(Persist, FutureSchemaRejected) {
    nlohmann::json j = to_json(sample_record(1));
    j["schema_version"] = kSchemaVersion + 1;
    EXPECT_THROW(load_records_text(j.dump() + "\n"), SchemaVersionError);
}

TEST(Persist, MalformedLinesReportLineNumber) {
    const std::string good = to_json(sample_record(1)).dump();
    try {
        load_records_text(good + "\n\n{not json\n");
        FAIL() << "expected RecordFormatError";
    } catch (const RecordFormatError &e) {
        EXPECT_EQ(e.line(), 3u);
    }
    nlohmann::json missing = to_json(sample_record(1));
    missing.erase("engine");
    EXPECT_THROW(load_records_text(missing.dump()), RecordFormatError);
    EXPECT_THROW(load_records("/nonexistent/records.jsonl"), std::runtime_error);
    EXPECT_TRUE(load_records_text("").empty());
}

TEST(RunSuite, EmptyClassList) {
    ConfigTable table;
    table.engines.push_back({EngineSpec{}, {}});
    EXPECT_TRUE(run_suite({}, {4, 6}, table, quick(1), make_provider(1)).empty());
}

TEST(RunSuite, StopsAtFirstFailure) {
    ConfigTable table;
    EngineSpec small;
    small.config.bond_dimension = 2;
    table.engines.push_back({small, {}});
    std::size_t sunk = 0;
    const auto recs = run_suite({"random", "ghz"}, {12, 4, 8}, table, quick(1), make_provider(1),
                                [&](const BenchmarkRecord &) { ++sunk; });
    ASSERT_FALSE(recs.empty());
    EXPECT_EQ(sunk, recs.size());
    std::vector<std::size_t> random_sizes;
    std::size_t ghz = 0;
    for (const auto &r : recs) {
        if (r.class_name == "random") {
            random_sizes.push_back(r.n_qubits);
        } else {
            ++ghz;
            EXPECT_EQ(r.status, Status::Ok);
        }
    }
    EXPECT_EQ(ghz, 3u);
    EXPECT_NE(recs[random_sizes.size() - 1].status, Status::Ok);
    EXPECT_LT(random_sizes.size(), 3u);
    EXPECT_EQ(random_sizes.front(), 4u);

    Protocol cont = quick(1);
    cont.continue_past_failure = true;
    const auto all = run_suite({"random"}, {4, 8, 12}, table, cont, make_provider(1));
    EXPECT_EQ(all.size(), 3u);
}

TEST(RunSuite, TunedOverrides) {
    ConfigTable table;
    EngineSpec base;
    base.config.bond_dimension = 2;
    MpsConfig tuned;
    tuned.bond_dimension = 64;
    table.engines.push_back({base, {{"wstate", tuned}}});
    EXPECT_EQ(table.resolve(0, "wstate").config.bond_dimension, 64u);
    EXPECT_EQ(table.resolve(0, "ghz").config.bond_dimension, 2u);
    const auto recs = run_suite({"wstate"}, {8}, table, quick(1), make_provider(1));
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].config.bond_dimension, 64u);
    EXPECT_EQ(recs[0].engine, engine_id(tuned));
}

TEST(EnginesIn, SortedDistinct) {
    std::vector<BenchmarkRecord> recs(3);
    recs[0].engine = "b";
    recs[1].engine = "a";
    recs[2].engine = "b";
    EXPECT_EQ(engines_in(recs), (std::vector<std::string>{"a", "b"}));
}

} // namespace
} // namespace mpsbench
