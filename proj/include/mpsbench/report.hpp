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
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mpsbench/harness.hpp"

namespace mpsbench {

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need >= 2 paired points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: values must be positive");
        }
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("loglog_slope: all x equal");
    }
    return sxy / sxx;
}

enum class Difficulty { Easy, Medium, Hard, VeryHard };

inline std::string_view difficulty_name(Difficulty d) {
    switch (d) {
    case Difficulty::Easy:
        return "Easy";
    case Difficulty::Medium:
        return "Medium";
    case Difficulty::Hard:
        return "Hard";
    case Difficulty::VeryHard:
        return "Very Hard";
    }
    return "?";
}

/// Band of a solved rate: >= 60% Easy, >= 30% Medium, >= 10% Hard.
inline Difficulty difficulty_band(double solved_rate) {
    if (solved_rate >= 0.6) {
        return Difficulty::Easy;
    }
    if (solved_rate >= 0.3) {
        return Difficulty::Medium;
    }
    if (solved_rate >= 0.1) {
        return Difficulty::Hard;
    }
    return Difficulty::VeryHard;
}

inline constexpr std::size_t kSlopeMinQubits = 30;
inline constexpr std::size_t kSlopeMinPoints = 3;

struct ReportRow {
    std::string class_name;
    std::string engine;
    std::size_t n = 0;
    double run_time_seconds = 0.0;
    double mirror_fidelity = 0.0;
    Status status = Status::Crash;
    std::optional<double> slope; ///< of the whole (class, engine) series
};

struct DifficultyCell {
    std::string class_name;
    std::size_t n = 0;
    std::size_t solved = 0;
    std::size_t engines = 0;
    double solved_rate = 0.0;
    Difficulty band = Difficulty::VeryHard;
    std::string fastest; ///< fastest solving engine, empty when unsolved
};

struct Report {
    std::vector<ReportRow> rows;
    std::map<std::pair<std::string, std::string>, std::size_t> max_qubits; ///< (class, engine) -> max ok n
    std::map<std::pair<std::string, std::string>, double> slopes;          ///< (class, engine) -> slope
    std::vector<DifficultyCell> difficulty;
    std::vector<std::string> engines;
    std::vector<std::string> classes;
};

/// Slope of a series from its ok points with n >= 30; nullopt with fewer than 3.
inline std::optional<double> series_slope(const std::vector<std::pair<std::size_t, double>> &ok_points) {
    std::map<std::size_t, double> best;
    for (const auto &[n, t] : ok_points) {
        if (n < kSlopeMinQubits || !(t > 0.0)) {
            continue;
        }
        auto [it, fresh] = best.emplace(n, t);
        if (!fresh) {
            it->second = std::min(it->second, t);
        }
    }
    if (best.size() < kSlopeMinPoints) {
        return std::nullopt;
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto &[n, t] : best) {
        x.push_back(static_cast<double>(n));
        y.push_back(t);
    }
    return loglog_slope(x, y);
}

/// Aggregates loaded records into the report tables. `engines` fixes the
/// denominator of the solved rate; by default every engine in the records.
inline Report build_report(const std::vector<BenchmarkRecord> &records, std::vector<std::string> engines = {}) {
    if (records.empty()) {
        throw std::invalid_argument("report: empty record set");
    }
    Report rep;
    if (engines.empty()) {
        engines = engines_in(records);
    }
    rep.engines = engines;
    std::set<std::string> classes;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::size_t, double>>> series;
    std::map<std::pair<std::string, std::size_t>, std::map<std::string, double>> solved_by; // (class, n) -> engine -> time
    std::set<std::pair<std::string, std::size_t>> instances;
    for (const BenchmarkRecord &r : records) {
        classes.insert(r.class_name);
        instances.insert({r.class_name, r.n_qubits});
        auto &mq = rep.max_qubits[{r.class_name, r.engine}];
        if (r.status == Status::Ok) {
            series[{r.class_name, r.engine}].push_back({r.n_qubits, r.run_time_seconds});
            mq = std::max(mq, r.n_qubits);
            auto &by = solved_by[{r.class_name, r.n_qubits}];
            auto [it, fresh] = by.emplace(r.engine, r.run_time_seconds);
            if (!fresh) {
                it->second = std::min(it->second, r.run_time_seconds);
            }
        }
    }
    rep.classes.assign(classes.begin(), classes.end());
    for (const auto &[key, pts] : series) {
        if (auto s = series_slope(pts)) {
            rep.slopes[key] = *s;
        }
    }
    for (const BenchmarkRecord &r : records) {
        ReportRow row{r.class_name, r.engine, r.n_qubits, r.run_time_seconds, r.mirror_fidelity, r.status, {}};
        if (auto it = rep.slopes.find({r.class_name, r.engine}); it != rep.slopes.end()) {
            row.slope = it->second;
        }
        rep.rows.push_back(std::move(row));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const ReportRow &a, const ReportRow &b) {
        return std::tie(a.class_name, a.engine, a.n) < std::tie(b.class_name, b.engine, b.n);
    });
    const std::set<std::string> counted(engines.begin(), engines.end());
    for (const auto &[cls, n] : instances) {
        DifficultyCell cell;
        cell.class_name = cls;
        cell.n = n;
        cell.engines = engines.size();
        double fastest = std::numeric_limits<double>::infinity();
        if (auto it = solved_by.find({cls, n}); it != solved_by.end()) {
            for (const auto &[engine, t] : it->second) {
                if (!counted.count(engine)) {
                    continue;
                }
                ++cell.solved;
                if (t < fastest) {
                    fastest = t;
                    cell.fastest = engine;
                }
            }
        }
        cell.solved_rate = cell.engines ? static_cast<double>(cell.solved) / static_cast<double>(cell.engines) : 0.0;
        cell.band = difficulty_band(cell.solved_rate);
        rep.difficulty.push_back(std::move(cell));
    }
    return rep;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

/// Run time versus n for one class (all engines), long format.
inline std::string runtime_csv(const Report &rep, const std::string &cls) {
    std::string out = "class,engine,n,run_time_seconds,mirror_fidelity,status,slope\n";
    for (const ReportRow &r : rep.rows) {
        if (r.class_name != cls) {
            continue;
        }
        out += r.class_name + "," + r.engine + "," + std::to_string(r.n) + "," + detail::fmt_double(r.run_time_seconds) +
               "," + detail::fmt_double(r.mirror_fidelity) + "," + std::string(status_name(r.status)) + "," +
               (r.slope ? detail::fmt_double(*r.slope) : std::string()) + "\n";
    }
    return out;
}

/// Maximum ok qubit count per class (rows) and engine (columns).
inline std::string max_qubits_csv(const Report &rep) {
    std::string out = "class";
    for (const std::string &e : rep.engines) {
        out += "," + e;
    }
    out += "\n";
    for (const std::string &c : rep.classes) {
        out += c;
        for (const std::string &e : rep.engines) {
            auto it = rep.max_qubits.find({c, e});
            out += ",";
            if (it != rep.max_qubits.end()) {
                out += std::to_string(it->second);
            }
        }
        out += "\n";
    }
    return out;
}

inline std::string difficulty_csv(const Report &rep) {
    std::string out = "class,n,solved,engines,solved_rate,band,fastest\n";
    for (const DifficultyCell &d : rep.difficulty) {
        out += d.class_name + "," + std::to_string(d.n) + "," + std::to_string(d.solved) + "," +
               std::to_string(d.engines) + "," + detail::fmt_double(d.solved_rate) + "," +
               std::string(difficulty_name(d.band)) + "," + d.fastest + "\n";
    }
    return out;
}

inline std::string slopes_csv(const Report &rep) {
    std::string out = "class,engine,slope\n";
    for (const auto &[key, s] : rep.slopes) {
        out += key.first + "," + key.second + "," + detail::fmt_double(s) + "\n";
    }
    return out;
}

} // namespace mpsbench
