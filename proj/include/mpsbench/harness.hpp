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
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "mpsbench/circuits.hpp"
#include "mpsbench/mps.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/statevector.hpp"

namespace mpsbench {

inline constexpr const char *kSoftwareVersion = "mpsbench 0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Knobs of one benchmark cell.
struct Protocol {
    std::size_t shots = 1000;
    std::size_t reps = 4;
    double deadline = 300.0;    ///< seconds, per repetition
    double fidelity_min = 0.99; ///< on the sampled mirror fidelity
    double angle_eps = kDefaultAngleEps;
    std::uint64_t circuit_seed = 1; ///< seed handed to the native generators
    bool continue_past_failure = false;

    void validate() const {
        if (reps == 0) {
            throw std::invalid_argument("protocol: reps must be >= 1");
        }
        if (!(fidelity_min >= 0.0 && fidelity_min <= 1.0)) {
            throw std::invalid_argument("protocol: fidelity_min must lie in [0, 1]");
        }
        if (!(angle_eps >= 0.0)) {
            throw std::invalid_argument("protocol: angle_eps must be >= 0");
        }
    }
};

enum class Status { Ok, Timeout, LowFidelity, Crash };

inline std::string_view status_name(Status s) {
    switch (s) {
    case Status::Ok:
        return "ok";
    case Status::Timeout:
        return "timeout";
    case Status::LowFidelity:
        return "low_fidelity";
    case Status::Crash:
        return "crash";
    }
    return "?";
}

inline Status parse_status(std::string_view s) {
    for (Status st : {Status::Ok, Status::Timeout, Status::LowFidelity, Status::Crash}) {
        if (status_name(st) == s) {
            return st;
        }
    }
    throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

/// Timeout beats low fidelity beats ok.
inline Status classify(bool timed_out, double mirror_fidelity, double fidelity_min) {
    if (timed_out) {
        return Status::Timeout;
    }
    if (mirror_fidelity < fidelity_min) {
        return Status::LowFidelity;
    }
    return Status::Ok;
}

enum class EngineKind { Mps, StateVector };

struct EngineSpec {
    EngineKind kind = EngineKind::Mps;
    MpsConfig config;
    std::string label; ///< overrides the derived engine id when non-empty
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex(std::uint64_t v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf + 16 - digits);
}

} // namespace detail

/// "mps:" plus a hash of every config field except the sampling seed.
inline std::string engine_id(const MpsConfig &c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "chi=%zu;eps=%.17g;fuse=%d;permute=%d;swap_split=%d", c.bond_dimension, c.cutoff,
                  c.fuse ? 1 : 0, c.permute ? 1 : 0, c.swap_split ? 1 : 0);
    return "mps:" + detail::hex(detail::fnv1a(buf), 8);
}

inline std::string engine_id(const EngineSpec &e) {
    if (!e.label.empty()) {
        return e.label;
    }
    return e.kind == EngineKind::StateVector ? std::string("statevector") : engine_id(e.config);
}

/// Hash of the sorted (bitstring, count) histogram, as 16 hex digits.
inline std::string sample_digest(const std::vector<std::string> &samples) {
    std::map<std::string, std::size_t> counts;
    for (const std::string &s : samples) {
        ++counts[s];
    }
    std::uint64_t h = detail::fnv1a("");
    for (const auto &[bits, k] : counts) {
        h = detail::fnv1a(bits, h);
        h = detail::fnv1a(":" + std::to_string(k) + "\n", h);
    }
    return detail::hex(h, 16);
}

struct BenchmarkRecord {
    int schema_version = kSchemaVersion;
    std::string class_name;
    std::size_t n_qubits = 0;
    std::string engine;
    MpsConfig config;
    double run_time_seconds = 0.0;
    std::vector<double> per_repetition_times;
    double mirror_fidelity = 0.0;
    std::optional<double> mirror_exact_probability; ///< diagnostic only
    std::string forward_sample_digest;
    Status status = Status::Crash;
    std::size_t shots = 0;
    std::size_t repetitions = 0;
    double deadline = 0.0;
    double fidelity_min = 0.0;
    std::optional<std::uint64_t> circuit_seed;
    double fidelity_estimate = 0.0;
    std::size_t peak_bond = 0;
    std::string error;
    std::string timestamp;
    std::string software_version = kSoftwareVersion;
    std::string host;

    bool operator==(const BenchmarkRecord &) const = default;
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json config_to_json(const MpsConfig &c) {
    return {{"bond_dimension", c.bond_dimension}, {"cutoff", c.cutoff},         {"fuse", c.fuse},
            {"permute", c.permute},               {"swap_split", c.swap_split}, {"rng_seed", c.rng_seed}};
}

inline MpsConfig config_from_json(const nlohmann::json &j) {
    MpsConfig c;
    c.bond_dimension = j.at("bond_dimension").get<std::size_t>();
    c.cutoff = j.at("cutoff").get<double>();
    c.fuse = j.at("fuse").get<bool>();
    c.permute = j.at("permute").get<bool>();
    c.swap_split = j.at("swap_split").get<bool>();
    c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    c.validate();
    return c;
}

inline nlohmann::json to_json(const BenchmarkRecord &r) {
    nlohmann::json j = {
        {"schema_version", r.schema_version},
        {"class", r.class_name},
        {"n_qubits", r.n_qubits},
        {"engine", r.engine},
        {"config", config_to_json(r.config)},
        {"run_time_seconds", r.run_time_seconds},
        {"per_repetition_times", r.per_repetition_times},
        {"mirror_fidelity", r.mirror_fidelity},
        {"mirror_exact_probability", nullptr},
        {"forward_sample_digest", r.forward_sample_digest},
        {"status", status_name(r.status)},
        {"shots", r.shots},
        {"repetitions", r.repetitions},
        {"deadline", r.deadline},
        {"fidelity_min", r.fidelity_min},
        {"circuit_seed", nullptr},
        {"fidelity_estimate", r.fidelity_estimate},
        {"peak_bond", r.peak_bond},
        {"error", r.error},
        {"timestamp", r.timestamp},
        {"software_version", r.software_version},
        {"host", r.host},
    };
    if (r.mirror_exact_probability) {
        j["mirror_exact_probability"] = *r.mirror_exact_probability;
    }
    if (r.circuit_seed) {
        j["circuit_seed"] = *r.circuit_seed;
    }
    return j;
}

class RecordFormatError : public std::runtime_error {
  public:
    RecordFormatError(std::size_t line, const std::string &msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class SchemaVersionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline BenchmarkRecord record_from_json(const nlohmann::json &j) {
    BenchmarkRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version > kSchemaVersion) {
        throw SchemaVersionError("record schema version " + std::to_string(r.schema_version) +
                                 " is newer than supported version " + std::to_string(kSchemaVersion));
    }
    r.class_name = j.at("class").get<std::string>();
    r.n_qubits = j.at("n_qubits").get<std::size_t>();
    r.engine = j.at("engine").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.run_time_seconds = j.at("run_time_seconds").get<double>();
    r.per_repetition_times = j.at("per_repetition_times").get<std::vector<double>>();
    r.mirror_fidelity = j.at("mirror_fidelity").get<double>();
    if (j.contains("mirror_exact_probability") && !j["mirror_exact_probability"].is_null()) {
        r.mirror_exact_probability = j["mirror_exact_probability"].get<double>();
    }
    r.forward_sample_digest = j.at("forward_sample_digest").get<std::string>();
    r.status = parse_status(j.at("status").get<std::string>());
    r.shots = j.at("shots").get<std::size_t>();
    r.repetitions = j.at("repetitions").get<std::size_t>();
    r.deadline = j.at("deadline").get<double>();
    r.fidelity_min = j.at("fidelity_min").get<double>();
    if (j.contains("circuit_seed") && !j["circuit_seed"].is_null()) {
        r.circuit_seed = j["circuit_seed"].get<std::uint64_t>();
    }
    r.fidelity_estimate = j.value("fidelity_estimate", 0.0);
    r.peak_bond = j.value("peak_bond", std::size_t{0});
    r.error = j.value("error", std::string());
    r.timestamp = j.value("timestamp", std::string());
    r.software_version = j.value("software_version", std::string());
    r.host = j.value("host", std::string());
    return r;
}

/// One JSON object per line.
inline std::string persist(const std::vector<BenchmarkRecord> &records) {
    std::string out;
    for (const BenchmarkRecord &r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

/// Appends records to a newline-delimited file, creating it if needed.
inline void append_records(const std::filesystem::path &path, const std::vector<BenchmarkRecord> &records) {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for appending");
    }
    f << persist(records);
    f.flush();
    if (!f) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

inline std::vector<BenchmarkRecord> load_records_text(std::string_view text) {
    std::vector<BenchmarkRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw RecordFormatError(line_no, std::string("malformed JSON: ") + e.what());
        }
        try {
            out.push_back(record_from_json(j));
        } catch (const SchemaVersionError &e) {
            throw SchemaVersionError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception &e) {
            throw RecordFormatError(line_no, std::string("invalid record: ") + e.what());
        }
    }
    return out;
}

inline std::vector<BenchmarkRecord> load_records(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return load_records_text(ss.str());
}

// ---------------------------------------------------------------------------
// Execution

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string host_descriptor() {
    char name[256] = {0};
    if (gethostname(name, sizeof name - 1) != 0) {
        std::snprintf(name, sizeof name, "unknown");
    }
    return std::string(name) + " (" + std::to_string(std::thread::hardware_concurrency()) + " threads)";
}

struct Execution {
    std::vector<std::string> samples;
    bool timed_out = false;
    double fidelity_estimate = 1.0;
    std::size_t peak_bond = 1;
    std::optional<double> zero_probability;
};

/// Runs a parsed circuit on one engine under a deadline.
inline Execution execute(const Circuit &c, const EngineSpec &engine, std::size_t shots, Clock::time_point deadline,
                         bool want_zero_probability = false) {
    Execution ex;
    if (engine.kind == EngineKind::Mps) {
        RunResult r = run(c, engine.config, shots, deadline, want_zero_probability);
        ex.timed_out = r.timed_out;
        ex.fidelity_estimate = r.fidelity_estimate;
        ex.peak_bond = r.peak_bond;
        if (want_zero_probability && r.state && !r.timed_out) {
            ex.zero_probability = std::norm(r.state->amplitude(std::string(c.n_qubits, '0')));
        }
        ex.samples = std::move(r.samples);
        return ex;
    }
    StateVector sv(c.n_qubits);
    for (const Gate &g : c.gates) {
        if (Clock::now() >= deadline) {
            ex.timed_out = true;
            return ex;
        }
        sv.apply(g);
    }
    if (Clock::now() >= deadline) {
        ex.timed_out = true;
        return ex;
    }
    Rng rng(engine.config.rng_seed);
    ex.samples = sv.sample(shots, rng);
    ex.peak_bond = 0;
    if (want_zero_probability) {
        ex.zero_probability = std::norm(sv.amplitudes()[0]);
    }
    return ex;
}

inline double zero_fraction(const std::vector<std::string> &samples) {
    if (samples.empty()) {
        return 0.0;
    }
    std::size_t zeros = 0;
    for (const std::string &s : samples) {
        zeros += s.find('1') == std::string::npos ? 1 : 0;
    }
    return static_cast<double>(zeros) / static_cast<double>(samples.size());
}

/// Benchmarks one circuit given as OpenQASM text.
///
/// Each repetition times parse + sanitize + pre-passes + simulation + shots
/// under its own deadline. Repetitions stop at the first one that misses the
/// deadline; only when none completed is the cell a timeout. The mirror
/// circuit runs once afterwards, untimed, with twice the deadline since it
/// holds twice the gates; it is skipped when the forward runs timed out.
inline BenchmarkRecord run_benchmark_qasm(const std::string &qasm, const std::string &class_label,
                                          const EngineSpec &engine, const Protocol &protocol) {
    protocol.validate();
    BenchmarkRecord rec;
    rec.class_name = class_label;
    rec.engine = engine_id(engine);
    rec.config = engine.config;
    rec.shots = protocol.shots;
    rec.deadline = protocol.deadline;
    rec.fidelity_min = protocol.fidelity_min;
    rec.timestamp = utc_timestamp();
    rec.host = host_descriptor();
    const auto budget = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(std::max(0.0, protocol.deadline)));
    try {
        engine.config.validate();
        std::optional<Circuit> parsed;
        bool completed = false;
        for (std::size_t rep = 0; rep < protocol.reps && protocol.deadline > 0.0; ++rep) {
            const auto t0 = Clock::now();
            const auto deadline = t0 + budget;
            Circuit c = sanitize(parse_qasm(qasm), protocol.angle_eps);
            Execution ex = execute(c, engine, protocol.shots, deadline);
            const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            rec.per_repetition_times.push_back(elapsed);
            ++rec.repetitions;
            const bool late = ex.timed_out || elapsed > protocol.deadline;
            if (late) {
                break;
            }
            completed = true;
            rec.fidelity_estimate = ex.fidelity_estimate;
            rec.peak_bond = ex.peak_bond;
            rec.forward_sample_digest = sample_digest(ex.samples);
            if (!parsed) {
                parsed = std::move(c);
            }
        }
        if (rec.per_repetition_times.empty()) {
            rec.run_time_seconds = std::max(0.0, protocol.deadline);
        } else {
            rec.run_time_seconds =
                *std::min_element(rec.per_repetition_times.begin(), rec.per_repetition_times.end());
        }
        if (!parsed) {
            rec.n_qubits = parse_qasm(qasm).n_qubits;
        } else {
            rec.n_qubits = parsed->n_qubits;
        }
        if (!completed) {
            rec.status = Status::Timeout;
            return rec;
        }
        const Circuit mirrored = mirror(*parsed);
        const auto mirror_deadline = Clock::now() + 2 * budget;
        Execution mx = execute(mirrored, engine, protocol.shots, mirror_deadline, true);
        if (mx.timed_out) {
            rec.status = Status::Timeout;
            rec.error = "mirror run exceeded its deadline";
            return rec;
        }
        rec.mirror_fidelity = zero_fraction(mx.samples);
        rec.mirror_exact_probability = mx.zero_probability;
        rec.status = classify(false, rec.mirror_fidelity, protocol.fidelity_min);
    } catch (const std::exception &e) {
        rec.status = Status::Crash;
        rec.error = e.what();
    }
    return rec;
}

/// Looks up the QASM text of a (class, n) cell; nullopt when unavailable.
using CircuitProvider = std::function<std::optional<std::string>(const std::string &cls, std::size_t n)>;

/// Natively generated classes; file-only classes are read from `qasm_dir`
/// as `<class>_<n>.qasm` or the MQTBench name `<class>_indep_qiskit_<n>.qasm`.
inline CircuitProvider make_provider(std::uint64_t seed, std::optional<std::filesystem::path> qasm_dir = {},
                                     GeneratorOptions opts = {}) {
    return [seed, qasm_dir, opts](const std::string &cls, std::size_t n) -> std::optional<std::string> {
        if (auto native = parse_class(cls)) {
            if (n < min_qubits(*native)) {
                return std::nullopt;
            }
            return serialize_qasm(generate(*native, n, seed, opts));
        }
        if (!qasm_dir) {
            return std::nullopt;
        }
        for (const std::string &stem :
             {cls + "_" + std::to_string(n), cls + "_indep_qiskit_" + std::to_string(n)}) {
            std::ifstream f(*qasm_dir / (stem + ".qasm"), std::ios::binary);
            if (f) {
                std::stringstream ss;
                ss << f.rdbuf();
                return ss.str();
            }
        }
        return std::nullopt;
    };
}

inline BenchmarkRecord run_benchmark(const std::string &cls, std::size_t n, const EngineSpec &engine,
                                     const Protocol &protocol, const CircuitProvider &provider) {
    const std::optional<std::string> qasm = provider(cls, n);
    if (!qasm) {
        BenchmarkRecord rec;
        rec.class_name = cls;
        rec.n_qubits = n;
        rec.engine = engine_id(engine);
        rec.config = engine.config;
        rec.shots = protocol.shots;
        rec.deadline = protocol.deadline;
        rec.fidelity_min = protocol.fidelity_min;
        rec.timestamp = utc_timestamp();
        rec.host = host_descriptor();
        rec.status = Status::Crash;
        rec.error = "no circuit available for " + cls + " at n=" + std::to_string(n);
        return rec;
    }
    BenchmarkRecord rec = run_benchmark_qasm(*qasm, cls, engine, protocol);
    if (rec.n_qubits == 0) {
        rec.n_qubits = n;
    }
    if (parse_class(cls)) {
        rec.circuit_seed = protocol.circuit_seed;
    }
    return rec;
}

/// Generated-circuit convenience overload.
inline BenchmarkRecord run_benchmark(CircuitClass cls, std::size_t n, const MpsConfig &config,
                                     const Protocol &protocol = {}) {
    EngineSpec engine;
    engine.config = config;
    return run_benchmark(std::string(class_name(cls)), n, engine, protocol, make_provider(protocol.circuit_seed));
}

/// Distinct engine ids, sorted.
inline std::vector<std::string> engines_in(const std::vector<BenchmarkRecord> &records) {
    std::set<std::string> s;
    for (const BenchmarkRecord &r : records) {
        s.insert(r.engine);
    }
    return {s.begin(), s.end()};
}

/// Per-engine, per-class configurations (the tuned-config table).
struct ConfigTable {
    struct Entry {
        EngineSpec base;                         ///< used for classes without an override
        std::map<std::string, MpsConfig> tuned; ///< class -> config
    };
    std::vector<Entry> engines;

    EngineSpec resolve(std::size_t engine, const std::string &cls) const {
        EngineSpec e = engines.at(engine).base;
        const auto &tuned = engines.at(engine).tuned;
        if (auto it = tuned.find(cls); it != tuned.end()) {
            e.config = it->second;
        }
        return e;
    }
};

/// Sweeps every class over the size grid for every engine.
///
/// A class sweep stops at the first size whose status is not ok unless
/// `continue_past_failure` is set. Every record is passed to `sink` as soon
/// as it exists and is also returned.
inline std::vector<BenchmarkRecord> run_suite(const std::vector<std::string> &classes,
                                              const std::vector<std::size_t> &n_grid, const ConfigTable &table,
                                              const Protocol &protocol, const CircuitProvider &provider,
                                              const std::function<void(const BenchmarkRecord &)> &sink = {}) {
    std::vector<BenchmarkRecord> out;
    std::vector<std::size_t> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t e = 0; e < table.engines.size(); ++e) {
        for (const std::string &cls : classes) {
            const EngineSpec engine = table.resolve(e, cls);
            for (std::size_t n : grid) {
                BenchmarkRecord rec = run_benchmark(cls, n, engine, protocol, provider);
                if (sink) {
                    sink(rec);
                }
                const bool ok = rec.status == Status::Ok;
                out.push_back(std::move(rec));
                if (!ok && !protocol.continue_past_failure) {
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace mpsbench
