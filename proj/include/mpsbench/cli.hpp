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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpsbench/circuits.hpp"
#include "mpsbench/elo.hpp"
#include "mpsbench/harness.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/report.hpp"
#include "mpsbench/tuner.hpp"

namespace mpsbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Bad input files or records; maps to exit code 2.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw DataError("cannot read " + p.string());
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path &p, const std::string &text) {
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) {
        throw DataError("cannot write " + p.string());
    }
}

/// `--seed` when given, else MPSBENCH_SEED, else 0.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
    if (flag) {
        return *flag;
    }
    if (const char *env = std::getenv("MPSBENCH_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception &) {
        }
        throw std::invalid_argument(std::string("MPSBENCH_SEED is not an unsigned integer: ") + env);
    }
    return 0;
}

/// Missing keys fall back to the MpsConfig defaults.
inline MpsConfig partial_config(const nlohmann::json &j) {
    nlohmann::json full = config_to_json(MpsConfig{});
    full.merge_patch(j);
    return config_from_json(full);
}

/// Engine entries in a config table file: either {"engines": [entry, ...]}
/// or a single entry. An entry holds optional "label", "engine" ("mps" or
/// "statevector"), "config" and a "tuned" map of class -> config.
inline ConfigTable load_config_table(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("config table: ") + e.what());
    }
    ConfigTable table;
    const nlohmann::json entries = j.contains("engines") ? j["engines"] : nlohmann::json::array({j});
    try {
        for (const nlohmann::json &e : entries) {
            ConfigTable::Entry entry;
            entry.base.label = e.value("label", std::string());
            const std::string kind = e.value("engine", std::string("mps"));
            if (kind == "statevector") {
                entry.base.kind = EngineKind::StateVector;
            } else if (kind != "mps") {
                throw DataError("config table: unknown engine '" + kind + "'");
            }
            if (e.contains("config")) {
                entry.base.config = partial_config(e["config"]);
            }
            if (e.contains("tuned")) {
                for (const auto &[cls, cfg] : e["tuned"].items()) {
                    entry.tuned[cls] = partial_config(cfg);
                }
            }
            table.engines.push_back(std::move(entry));
        }
    } catch (const DataError &) {
        throw;
    } catch (const std::exception &e) {
        throw DataError(std::string("config table: ") + e.what());
    }
    if (table.engines.empty()) {
        throw DataError("config table: no engines");
    }
    return table;
}

inline std::vector<BenchmarkRecord> load_records_or_throw(const std::filesystem::path &p) {
    const std::string text = read_file(p);
    try {
        return load_records_text(text);
    } catch (const std::exception &e) {
        throw DataError(p.string() + ": " + e.what());
    }
}

struct EngineFlags {
    std::size_t chi = 64;
    double cutoff = 1e-10;
    bool fuse = false;
    bool permute = false;
    bool no_swap_split = false;
    std::string engine = "mps";
    std::string label;

    void add(CLI::App *app) {
        app->add_option("--chi", chi, "Bond dimension")->check(CLI::PositiveNumber);
        app->add_option("--cutoff", cutoff, "Relative singular-value cutoff")->check(CLI::Range(0.0, 0.999999));
        app->add_flag("--fuse", fuse, "Fuse gates into <= 2-qubit blocks");
        app->add_flag("--permute", permute, "Optimize the qubit placement");
        app->add_flag("--no-swap-split", no_swap_split, "Undo routing swaps right after each gate");
        app->add_option("--engine", engine, "mps or statevector")->check(CLI::IsMember({"mps", "statevector"}));
        app->add_option("--label", label, "Engine id to record instead of the derived one");
    }

    EngineSpec spec(std::uint64_t seed) const {
        EngineSpec e;
        e.kind = engine == "statevector" ? EngineKind::StateVector : EngineKind::Mps;
        e.config.bond_dimension = chi;
        e.config.cutoff = cutoff;
        e.config.fuse = fuse;
        e.config.permute = permute;
        e.config.swap_split = !no_swap_split;
        e.config.rng_seed = seed;
        e.label = label;
        return e;
    }
};

struct ProtocolFlags {
    Protocol p;

    void add(CLI::App *app) {
        app->add_option("--shots", p.shots, "Samples per run");
        app->add_option("--reps", p.reps, "Timed repetitions")->check(CLI::PositiveNumber);
        app->add_option("--deadline", p.deadline, "Seconds allowed per repetition")->check(CLI::NonNegativeNumber);
        app->add_option("--fidelity-min", p.fidelity_min, "Mirror fidelity threshold")->check(CLI::Range(0.0, 1.0));
        app->add_option("--angle-eps", p.angle_eps, "Negligible rotation angle")->check(CLI::NonNegativeNumber);
    }
};

inline std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

/// Entry point behind the `mpsbench` executable.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"MPS circuit emulator and benchmark harness", "mpsbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kSoftwareVersion);

    std::optional<std::uint64_t> seed_flag;

    // generate
    auto *gen = app.add_subcommand("generate", "Write a benchmark circuit as OpenQASM 2.0");
    std::string gen_class;
    std::size_t gen_n = 0;
    std::string gen_out;
    bool gen_mirror = false;
    GeneratorOptions gen_opts;
    gen->add_option("--class", gen_class, "Circuit class")->required();
    gen->add_option("--n", gen_n, "Qubit count")->required();
    gen->add_option("--seed", seed_flag, "Generator seed");
    gen->add_option("-o,--out", gen_out, "Output file (stdout when omitted)");
    gen->add_flag("--mirror", gen_mirror, "Emit the mirror circuit instead");
    gen->add_option("--graph-degree", gen_opts.graph_degree, "graphstate degree")->check(CLI::PositiveNumber);
    gen->add_option("--ansatz-reps", gen_opts.ansatz_reps, "realamp/su2rand layers")->check(CLI::PositiveNumber);

    // run
    auto *runc = app.add_subcommand("run", "Benchmark one QASM file");
    std::string run_path;
    std::string run_class;
    std::string run_out = "bench.jsonl";
    EngineFlags run_engine;
    ProtocolFlags run_proto;
    runc->add_option("qasm", run_path, "OpenQASM 2.0 file")->required();
    runc->add_option("--class", run_class, "Class label (default: circuit name or file stem)");
    runc->add_option("--out", run_out, "Record file to append to");
    runc->add_option("--seed", seed_flag, "Sampling seed");
    run_engine.add(runc);
    run_proto.add(runc);

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Sweep classes over the qubit grid");
    std::string sweep_classes;
    std::size_t sweep_min = 4;
    std::size_t sweep_max = 1024;
    std::string sweep_sizes;
    std::string sweep_table;
    std::string sweep_qasm_dir;
    std::string sweep_out = "bench.jsonl";
    EngineFlags sweep_engine;
    ProtocolFlags sweep_proto;
    sweep->add_option("--classes", sweep_classes, "Comma-separated class names")->required();
    sweep->add_option("--n-min", sweep_min, "Smallest grid size");
    sweep->add_option("--n-max", sweep_max, "Largest grid size");
    sweep->add_option("--sizes", sweep_sizes, "Explicit comma-separated sizes (overrides the grid)");
    sweep->add_option("--config-table", sweep_table, "JSON config table (overrides engine flags)");
    sweep->add_option("--qasm-dir", sweep_qasm_dir, "Directory with <class>_<n>.qasm files");
    sweep->add_option("--out", sweep_out, "Record file to append to");
    sweep->add_option("--seed", seed_flag, "Generator and sampling seed");
    sweep->add_flag("--continue-past-failure", sweep_proto.p.continue_past_failure, "Keep sweeping after a failure");
    sweep_engine.add(sweep);
    sweep_proto.add(sweep);

    // tune
    auto *tunec = app.add_subcommand("tune", "Search MPS hyperparameters with CMA-ES");
    std::string tune_class;
    std::size_t tune_budget = 100;
    std::string tune_out;
    std::string tune_qasm_dir;
    TuneOptions tune_opts;
    ProtocolFlags tune_proto;
    bool tune_no_probe = false;
    tunec->add_option("--class", tune_class, "Circuit class")->required();
    tunec->add_option("--n", tune_opts.n_tune, "Tuning size");
    tunec->add_option("--budget", tune_budget, "Maximum objective evaluations")->check(CLI::PositiveNumber);
    tunec->add_option("--population", tune_opts.cmaes.population, "CMA-ES population")->check(CLI::Range(4, 1000));
    tunec->add_option("--generations", tune_opts.cmaes.max_generations, "CMA-ES generations");
    tunec->add_option("--sigma0", tune_opts.cmaes.sigma0, "Initial step size (index units)")->check(CLI::PositiveNumber);
    tunec->add_option("--seed", seed_flag, "Search, generator and sampling seed");
    tunec->add_option("--qasm-dir", tune_qasm_dir, "Directory with <class>_<n>.qasm files");
    tunec->add_option("--records", tune_out, "Also append every evaluated record to this file");
    tunec->add_flag("--no-probe", tune_no_probe, "Tune directly at --n without the probe/fallback step");
    tune_proto.add(tunec);

    // rank
    auto *rank = app.add_subcommand("rank", "Elo tournament over benchmark records");
    std::string rank_records;
    std::size_t rank_trials = 200000;
    double rank_k = kDefaultK;
    std::string rank_engines;
    std::string rank_csv;
    std::string rank_json;
    rank->add_option("--records", rank_records, "Record file")->required();
    rank->add_option("--trials", rank_trials, "Randomized trials")->check(CLI::PositiveNumber);
    rank->add_option("--k", rank_k, "K-factor")->check(CLI::PositiveNumber);
    rank->add_option("--engines", rank_engines, "Comma-separated engine ids (default: all)");
    rank->add_option("--seed", seed_flag, "Trial seed");
    rank->add_option("--csv", rank_csv, "Write the win-rate matrix CSV here");
    rank->add_option("--json", rank_json, "Write the Elo table JSON here (stdout otherwise)");

    // report
    auto *rep = app.add_subcommand("report", "CSV tables from benchmark records");
    std::string rep_records;
    std::string rep_dir = "report";
    std::string rep_engines;
    rep->add_option("--records", rep_records, "Record file")->required();
    rep->add_option("--out-dir", rep_dir, "Output directory");
    rep->add_option("--engines", rep_engines, "Engine set for solved rates (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const std::uint64_t seed = resolve_seed(seed_flag);

        if (*gen) {
            const auto cls = parse_class(gen_class);
            if (!cls) {
                err << "unknown or file-only class '" << gen_class << "'\n";
                return kExitUsage;
            }
            Circuit c;
            try {
                c = generate(*cls, gen_n, seed, gen_opts);
            } catch (const std::invalid_argument &e) {
                err << e.what() << "\n";
                return kExitUsage;
            }
            const std::string text = serialize_qasm(gen_mirror ? mirror(c) : c);
            if (gen_out.empty()) {
                out << text;
            } else {
                write_file(gen_out, text);
            }
            return kExitOk;
        }

        if (*runc) {
            const std::string text = read_file(run_path);
            std::string label = run_class;
            if (label.empty()) {
                try {
                    label = parse_qasm(text).name;
                } catch (const QasmError &e) {
                    throw DataError(run_path + ": " + e.what());
                }
                if (label.empty()) {
                    label = std::filesystem::path(run_path).stem().string();
                }
            }
            BenchmarkRecord rec = run_benchmark_qasm(text, label, run_engine.spec(seed), run_proto.p);
            append_records(run_out, {rec});
            out << to_json(rec).dump() << "\n";
            return rec.status == Status::Crash ? kExitData : kExitOk;
        }

        if (*sweep) {
            std::vector<std::size_t> sizes;
            if (!sweep_sizes.empty()) {
                for (const std::string &s : split_list(sweep_sizes)) {
                    sizes.push_back(static_cast<std::size_t>(std::stoull(s)));
                }
            } else {
                if (sweep_min < 2 || sweep_min > sweep_max) {
                    err << "invalid --n-min/--n-max\n";
                    return kExitUsage;
                }
                sizes = qubit_grid(sweep_min, sweep_max);
            }
            ConfigTable table;
            if (!sweep_table.empty()) {
                table = load_config_table(read_file(sweep_table));
                for (auto &e : table.engines) {
                    e.base.config.rng_seed = seed;
                    for (auto &[cls, cfg] : e.tuned) {
                        cfg.rng_seed = seed;
                    }
                }
            } else {
                table.engines.push_back({sweep_engine.spec(seed), {}});
            }
            Protocol p = sweep_proto.p;
            p.circuit_seed = seed;
            std::optional<std::filesystem::path> dir;
            if (!sweep_qasm_dir.empty()) {
                dir = sweep_qasm_dir;
            }
            const auto records =
                run_suite(split_list(sweep_classes), sizes, table, p, make_provider(seed, dir),
                          [&](const BenchmarkRecord &r) {
                              append_records(sweep_out, {r});
                              out << r.class_name << " n=" << r.n_qubits << " " << r.engine << " "
                                  << status_name(r.status) << " t=" << r.run_time_seconds
                                  << " F=" << r.mirror_fidelity << "\n";
                          });
            out << records.size() << " records appended to " << sweep_out << "\n";
            return kExitOk;
        }

        if (*tunec) {
            tune_opts.protocol = tune_proto.p;
            tune_opts.protocol.circuit_seed = seed;
            tune_opts.cmaes.seed = seed;
            tune_opts.cmaes.max_evaluations = tune_budget;
            tune_opts.cmaes.max_generations = std::max<std::size_t>(
                tune_opts.cmaes.max_generations, (tune_budget + tune_opts.cmaes.population - 1) / tune_opts.cmaes.population);
            tune_opts.base.rng_seed = seed;
            tune_opts.probe = !tune_no_probe;
            std::optional<std::filesystem::path> dir;
            if (!tune_qasm_dir.empty()) {
                dir = tune_qasm_dir;
            }
            std::function<void(const BenchmarkRecord &)> sink;
            if (!tune_out.empty()) {
                sink = [&](const BenchmarkRecord &r) { append_records(tune_out, {r}); };
            }
            const TuneResult res = tune(tune_class, default_space(), tune_opts, make_provider(seed, dir), sink);
            nlohmann::json j = {
                {"label", "tuned:" + tune_class},
                {"engine", "mps"},
                {"tuned", {{tune_class, config_to_json(res.best)}}},
                {"feasible", res.feasible},
                {"n_tuned", res.n_tuned},
                {"fell_back", res.fell_back},
                {"evaluations", res.search.evaluations},
                {"search_cost", res.search_cost},
                {"record", to_json(res.record)},
            };
            out << j.dump(2) << "\n";
            return kExitOk;
        }

        if (*rank) {
            const auto records = load_records_or_throw(rank_records);
            EloTable t;
            try {
                t = tournament(records, split_list(rank_engines), rank_trials, seed, rank_k);
            } catch (const std::invalid_argument &e) {
                throw DataError(e.what());
            }
            const std::string j = to_json(t).dump(2);
            if (rank_json.empty()) {
                out << j << "\n";
            } else {
                write_file(rank_json, j + "\n");
            }
            if (!rank_csv.empty()) {
                write_file(rank_csv, win_rate_csv(t));
            }
            return kExitOk;
        }

        if (*rep) {
            const auto records = load_records_or_throw(rep_records);
            Report r;
            try {
                r = build_report(records, split_list(rep_engines));
            } catch (const std::invalid_argument &e) {
                throw DataError(e.what());
            }
            const std::filesystem::path dir = rep_dir;
            for (const std::string &cls : r.classes) {
                write_file(dir / ("runtime_" + cls + ".csv"), runtime_csv(r, cls));
            }
            write_file(dir / "max_qubits.csv", max_qubits_csv(r));
            write_file(dir / "difficulty.csv", difficulty_csv(r));
            write_file(dir / "slopes.csv", slopes_csv(r));
            out << "wrote " << r.classes.size() + 3 << " CSV files to " << dir.string() << "\n";
            return kExitOk;
        }
    } catch (const DataError &e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const QasmError &e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

} // namespace mpsbench::cli
