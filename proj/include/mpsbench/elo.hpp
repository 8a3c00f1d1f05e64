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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mpsbench/harness.hpp"
#include "mpsbench/rng.hpp"

namespace mpsbench {

inline constexpr double kInitialRating = 1200.0;
inline constexpr double kDefaultK = 32.0;

/// Probability-like score of A against B.
inline double expected_score(double ra, double rb) { return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0)); }

/// Ratings after one game; `a_won` is S_A.
inline std::pair<double, double> elo_update(double ra, double rb, bool a_won, double k = kDefaultK) {
    const double ea = expected_score(ra, rb);
    const double delta = k * ((a_won ? 1.0 : 0.0) - ea);
    return {ra + delta, rb - delta};
}

/// Best result of one engine on one class.
struct ClassSummary {
    std::size_t max_ok_n = 0;
    double time_at_max = std::numeric_limits<double>::infinity();
    double best_attempt_time = std::numeric_limits<double>::infinity();
    bool attempted = false;
};

inline ClassSummary summarize(const std::vector<BenchmarkRecord> &records, const std::string &engine,
                              const std::string &cls) {
    ClassSummary s;
    for (const BenchmarkRecord &r : records) {
        if (r.engine != engine || r.class_name != cls) {
            continue;
        }
        s.attempted = true;
        s.best_attempt_time = std::min(s.best_attempt_time, r.run_time_seconds);
        if (r.status != Status::Ok) {
            continue;
        }
        if (r.n_qubits > s.max_ok_n) {
            s.max_ok_n = r.n_qubits;
            s.time_at_max = r.run_time_seconds;
        } else if (r.n_qubits == s.max_ok_n) {
            s.time_at_max = std::min(s.time_at_max, r.run_time_seconds);
        }
    }
    return s;
}

struct MatchOutcome {
    std::string engine_a;
    std::string engine_b;
    std::string class_name;
    bool a_wins = false;
    bool exact_tie = false; ///< identical results; each game is a fair coin flip

    std::string winner() const {
        if (exact_tie) {
            return "";
        }
        return a_wins ? engine_a : engine_b;
    }
};

/// Decides one class between two engines.
///
/// More qubits solved wins; equal maxima go to the faster run at that size.
/// When neither solved anything the faster best attempt wins. Results that
/// are identical in both size and time are flagged `exact_tie`; the
/// tournament then settles each such game by a fair coin so no game is
/// drawn. Returns nullopt when either engine has no record for the class.
inline std::optional<MatchOutcome> match_outcome(const ClassSummary &a, const ClassSummary &b,
                                                 const std::string &engine_a, const std::string &engine_b,
                                                 const std::string &cls) {
    if (!a.attempted || !b.attempted) {
        return std::nullopt;
    }
    MatchOutcome m{engine_a, engine_b, cls, false};
    if (a.max_ok_n != b.max_ok_n) {
        m.a_wins = a.max_ok_n > b.max_ok_n;
        return m;
    }
    const double ta = a.max_ok_n > 0 ? a.time_at_max : a.best_attempt_time;
    const double tb = b.max_ok_n > 0 ? b.time_at_max : b.best_attempt_time;
    m.a_wins = ta < tb;
    m.exact_tie = ta == tb;
    return m;
}

inline std::optional<MatchOutcome> match_outcome(const std::vector<BenchmarkRecord> &records,
                                                 const std::string &engine_a, const std::string &engine_b,
                                                 const std::string &cls) {
    return match_outcome(summarize(records, engine_a, cls), summarize(records, engine_b, cls), engine_a, engine_b,
                         cls);
}

struct EloTable {
    std::vector<std::string> engines;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<std::vector<double>> win_rate; ///< [a][b]: share of classes a won against b
    std::vector<MatchOutcome> matches;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double k = kDefaultK;
};

/// Randomized-order Elo tournament.
///
/// Every trial starts all engines at 1200, shuffles the class order and the
/// pair order inside each class with its own RNG stream, and plays each pair
/// once per class. Means and sample standard deviations are over trials.
/// Match outcomes do not depend on the order, so the win-rate matrix is
/// computed once; an exact tie counts half a win for each side.
inline EloTable tournament(const std::vector<BenchmarkRecord> &records, std::vector<std::string> engines = {},
                           std::size_t trials = 200000, std::uint64_t seed = 0, double k = kDefaultK) {
    if (engines.empty()) {
        engines = engines_in(records);
    }
    std::sort(engines.begin(), engines.end());
    engines.erase(std::unique(engines.begin(), engines.end()), engines.end());
    if (engines.size() < 2) {
        throw std::invalid_argument("tournament: fewer than 2 engines");
    }
    if (trials == 0) {
        throw std::invalid_argument("tournament: trials must be >= 1");
    }
    std::set<std::string> class_set;
    for (const BenchmarkRecord &r : records) {
        class_set.insert(r.class_name);
    }
    const std::vector<std::string> classes(class_set.begin(), class_set.end());
    const std::size_t ne = engines.size();

    EloTable t;
    t.engines = engines;
    t.trials = trials;
    t.seed = seed;
    t.k = k;

    struct Game {
        std::size_t a;
        std::size_t b;
        bool a_wins;
        bool coin;
    };
    std::vector<std::vector<Game>> games;
    std::vector<std::vector<double>> wins(ne, std::vector<double>(ne, 0.0));
    std::vector<std::vector<double>> played(ne, std::vector<double>(ne, 0.0));
    for (const std::string &cls : classes) {
        std::vector<ClassSummary> sums;
        for (const std::string &e : engines) {
            sums.push_back(summarize(records, e, cls));
        }
        std::vector<Game> g;
        for (std::size_t i = 0; i < ne; ++i) {
            for (std::size_t j = i + 1; j < ne; ++j) {
                auto m = match_outcome(sums[i], sums[j], engines[i], engines[j], cls);
                if (!m) {
                    continue;
                }
                g.push_back({i, j, m->a_wins, m->exact_tie});
                t.matches.push_back(*m);
                if (m->exact_tie) {
                    wins[i][j] += 0.5;
                    wins[j][i] += 0.5;
                } else {
                    wins[m->a_wins ? i : j][m->a_wins ? j : i] += 1.0;
                }
                played[i][j] += 1.0;
                played[j][i] += 1.0;
            }
        }
        if (!g.empty()) {
            games.push_back(std::move(g));
        }
    }

    t.win_rate.assign(ne, std::vector<double>(ne, 0.5));
    for (std::size_t i = 0; i < ne; ++i) {
        for (std::size_t j = 0; j < ne; ++j) {
            if (i != j && played[i][j] > 0.0) {
                t.win_rate[i][j] = wins[i][j] / played[i][j];
            }
        }
    }

    // Welford accumulation over trials.
    std::vector<double> mean(ne, 0.0);
    std::vector<double> m2(ne, 0.0);
    std::vector<double> rating(ne);
    std::vector<std::size_t> class_order(games.size());
    std::vector<std::size_t> pair_order;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(split_seed(seed, trial));
        std::fill(rating.begin(), rating.end(), kInitialRating);
        for (std::size_t c = 0; c < class_order.size(); ++c) {
            class_order[c] = c;
        }
        rng.shuffle(class_order);
        for (std::size_t c : class_order) {
            const std::vector<Game> &g = games[c];
            pair_order.resize(g.size());
            for (std::size_t p = 0; p < g.size(); ++p) {
                pair_order[p] = p;
            }
            rng.shuffle(pair_order);
            for (std::size_t p : pair_order) {
                const Game &game = g[p];
                const bool a_wins = game.coin ? rng.below(2) == 0 : game.a_wins;
                auto [ra, rb] = elo_update(rating[game.a], rating[game.b], a_wins, k);
                rating[game.a] = ra;
                rating[game.b] = rb;
            }
        }
        const double count = static_cast<double>(trial + 1);
        for (std::size_t e = 0; e < ne; ++e) {
            const double d = rating[e] - mean[e];
            mean[e] += d / count;
            m2[e] += d * (rating[e] - mean[e]);
        }
    }
    t.mean = mean;
    t.stddev.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        t.stddev[e] = trials > 1 ? std::sqrt(m2[e] / static_cast<double>(trials - 1)) : 0.0;
    }
    return t;
}

inline nlohmann::json to_json(const EloTable &t) {
    nlohmann::json engines = nlohmann::json::array();
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        engines.push_back({{"engine", t.engines[i]}, {"mean", t.mean[i]}, {"stddev", t.stddev[i]}});
    }
    nlohmann::json matches = nlohmann::json::array();
    for (const MatchOutcome &m : t.matches) {
        matches.push_back({{"class", m.class_name}, {"engine_a", m.engine_a}, {"engine_b", m.engine_b},
                           {"winner", m.exact_tie ? nlohmann::json(nullptr) : nlohmann::json(m.winner())}});
    }
    return {{"trials", t.trials}, {"seed", t.seed},         {"k", t.k},
            {"ratings", engines}, {"win_rate", t.win_rate}, {"matches", matches}};
}

/// Square CSV with engines as both header row and first column.
inline std::string win_rate_csv(const EloTable &t) {
    std::string out = "engine";
    for (const std::string &e : t.engines) {
        out += "," + e;
    }
    out += "\n";
    char buf[32];
    for (std::size_t i = 0; i < t.engines.size(); ++i) {
        out += t.engines[i];
        for (std::size_t j = 0; j < t.engines.size(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.6f", t.win_rate[i][j]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace mpsbench
