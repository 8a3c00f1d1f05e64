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
#include <numeric>
#include <unordered_map>
#include <vector>

#include "mpsbench/linalg.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/rng.hpp"

namespace mpsbench {

/// A unitary block as consumed by the MPS engine.
///
/// Two-qubit matrices use local index 2*bit(a) + bit(b). `Swap` blocks are
/// exact SWAPs and are realized by relabelling rather than contraction.
struct FusedOp {
    enum class Kind : std::uint8_t { One, Two, Swap };
    Kind kind = Kind::One;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    Mat2 m1 = Mat2::Identity();
    Mat4 m2 = Mat4::Identity();
};

struct FusedCircuit {
    std::size_t n_qubits = 0;
    std::vector<FusedOp> ops;

    std::size_t two_qubit_count() const {
        return static_cast<std::size_t>(std::count_if(
            ops.begin(), ops.end(), [](const FusedOp &op) { return op.kind == FusedOp::Kind::Two; }));
    }
};

namespace detail {

inline bool near(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, double tol = 1e-12) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

/// Exact factorization k = kron(hi, lo), if one exists.
inline bool split_kron(const Mat4 &k, Mat2 &hi, Mat2 &lo) {
    int bi = 0;
    int bj = 0;
    k.cwiseAbs().maxCoeff(&bi, &bj);
    const cplx pivot = k(bi, bj);
    if (std::abs(pivot) < 1e-300) {
        return false;
    }
    // k(2a+b, 2c+d) = hi(a,c) lo(b,d)
    const int a0 = bi / 2, b0 = bi % 2, c0 = bj / 2, d0 = bj % 2;
    for (int b = 0; b < 2; ++b) {
        for (int d = 0; d < 2; ++d) {
            lo(b, d) = k(2 * a0 + b, 2 * c0 + d);
        }
    }
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 2; ++c) {
            hi(a, c) = k(2 * a + b0, 2 * c + d0) / pivot;
        }
    }
    // Keep both factors unitary; the MPS renormalizes after every split, so
    // a scaled factor would silently change the state.
    const double s = std::sqrt(hi.squaredNorm() / 2.0);
    if (s < 1e-300) {
        return false;
    }
    hi /= s;
    lo *= s;
    return near(kron(hi, lo), k);
}

} // namespace detail

/// One block per U/CX gate, no merging. Barriers and measurements vanish.
inline FusedCircuit lower(const Circuit &c) {
    FusedCircuit out{c.n_qubits, {}};
    out.ops.reserve(c.gates.size());
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::U) {
            FusedOp op;
            op.kind = FusedOp::Kind::One;
            op.a = g.qubits[0];
            op.m1 = u_matrix(g.params[0], g.params[1], g.params[2]);
            out.ops.push_back(op);
        } else if (g.kind == GateKind::CX) {
            FusedOp op;
            op.kind = FusedOp::Kind::Two;
            op.a = g.qubits[0];
            op.b = g.qubits[1];
            op.m2 = cx_matrix();
            out.ops.push_back(op);
        }
    }
    return out;
}

/// Greedy gate fusion into blocks of at most two qubits.
///
/// A gate is merged into the most recent block on its support when that block
/// is still the last operation on every qubit involved; a CX otherwise opens a
/// new two-qubit block that swallows pending single-qubit blocks on its
/// qubits. Barriers close every open block. Blocks equal to the identity are
/// dropped and exact SWAPs are tagged. The represented unitary, including its
/// global phase, is unchanged.
inline FusedCircuit fuse_pass(const Circuit &c) {
    FusedCircuit out{c.n_qubits, {}};
    std::vector<FusedOp> &ops = out.ops;
    std::vector<bool> dead;
    std::vector<std::ptrdiff_t> open(c.n_qubits, -1);

    auto embed = [](const FusedOp &blk, std::uint32_t q, const Mat2 &m) -> Mat4 {
        return q == blk.a ? kron(m, Mat2::Identity()) : kron(Mat2::Identity(), m);
    };

    for (const Gate &g : c.gates) {
        switch (g.kind) {
        case GateKind::U: {
            const std::uint32_t q = g.qubits[0];
            const Mat2 m = u_matrix(g.params[0], g.params[1], g.params[2]);
            const std::ptrdiff_t blk = open[q];
            if (blk >= 0) {
                FusedOp &op = ops[static_cast<std::size_t>(blk)];
                if (op.kind == FusedOp::Kind::One) {
                    op.m1 = m * op.m1;
                } else {
                    op.m2 = embed(op, q, m) * op.m2;
                }
            } else {
                FusedOp op;
                op.a = q;
                op.m1 = m;
                ops.push_back(op);
                dead.push_back(false);
                open[q] = static_cast<std::ptrdiff_t>(ops.size() - 1);
            }
            break;
        }
        case GateKind::CX: {
            const std::uint32_t ctl = g.qubits[0];
            const std::uint32_t tgt = g.qubits[1];
            const std::ptrdiff_t bc = open[ctl];
            const std::ptrdiff_t bt = open[tgt];
            if (bc >= 0 && bc == bt) {
                FusedOp &op = ops[static_cast<std::size_t>(bc)];
                op.m2 = (ctl == op.a ? cx_matrix() : cx_reversed_matrix()) * op.m2;
                break;
            }
            FusedOp op;
            op.kind = FusedOp::Kind::Two;
            op.a = ctl;
            op.b = tgt;
            Mat2 pre_a = Mat2::Identity();
            Mat2 pre_b = Mat2::Identity();
            if (bc >= 0 && ops[static_cast<std::size_t>(bc)].kind == FusedOp::Kind::One) {
                pre_a = ops[static_cast<std::size_t>(bc)].m1;
                dead[static_cast<std::size_t>(bc)] = true;
            }
            if (bt >= 0 && ops[static_cast<std::size_t>(bt)].kind == FusedOp::Kind::One) {
                pre_b = ops[static_cast<std::size_t>(bt)].m1;
                dead[static_cast<std::size_t>(bt)] = true;
            }
            op.m2 = cx_matrix() * kron(pre_a, pre_b);
            ops.push_back(op);
            dead.push_back(false);
            open[ctl] = open[tgt] = static_cast<std::ptrdiff_t>(ops.size() - 1);
            break;
        }
        case GateKind::Barrier:
            std::fill(open.begin(), open.end(), -1);
            break;
        case GateKind::Measure:
            open[g.qubits[0]] = -1;
            break;
        }
    }

    const Mat4 id4 = Mat4::Identity();
    const Mat2 id2 = Mat2::Identity();
    const Mat4 swp = swap_matrix();
    std::vector<FusedOp> kept;
    kept.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (dead[i]) {
            continue;
        }
        FusedOp op = ops[i];
        if (op.kind == FusedOp::Kind::One) {
            if (!detail::near(op.m1, id2)) {
                kept.push_back(op);
            }
            continue;
        }
        if (detail::near(op.m2, id4)) {
            continue;
        }
        // Blocks that are local, or a SWAP after local gates, need no
        // two-site contraction.
        Mat2 hi;
        Mat2 lo;
        const bool local = detail::split_kron(op.m2, hi, lo);
        const bool swapped = !local && detail::split_kron(swp * op.m2, hi, lo);
        if (!local && !swapped) {
            kept.push_back(op);
            continue;
        }
        for (auto [q, m] : {std::pair{op.a, hi}, std::pair{op.b, lo}}) {
            if (!detail::near(m, id2)) {
                FusedOp one;
                one.a = q;
                one.m1 = m;
                kept.push_back(one);
            }
        }
        if (swapped) {
            op.kind = FusedOp::Kind::Swap;
            op.m2 = swp;
            kept.push_back(op);
        }
    }
    ops = std::move(kept);
    return out;
}

/// Sum over CX gates of the chain distance between control and target.
/// `position[q]` is the chain site of logical qubit q.
inline std::size_t routing_cost(const Circuit &c, const std::vector<std::size_t> &position) {
    std::size_t cost = 0;
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::CX) {
            const auto pa = position[g.qubits[0]];
            const auto pb = position[g.qubits[1]];
            cost += pa > pb ? pa - pb : pb - pa;
        }
    }
    return cost;
}

namespace detail {

struct InteractionGraph {
    // adjacency[q] = (neighbour, weight)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency;

    explicit InteractionGraph(const Circuit &c) : adjacency(c.n_qubits) {
        std::unordered_map<std::uint64_t, std::size_t> weight;
        for (const Gate &g : c.gates) {
            if (g.kind == GateKind::CX) {
                std::uint64_t a = g.qubits[0];
                std::uint64_t b = g.qubits[1];
                if (a > b) {
                    std::swap(a, b);
                }
                ++weight[(a << 32) | b];
            }
        }
        for (const auto &[key, w] : weight) {
            const std::size_t a = key >> 32;
            const std::size_t b = key & 0xffffffffULL;
            adjacency[a].emplace_back(b, w);
            adjacency[b].emplace_back(a, w);
        }
        for (auto &row : adjacency) {
            std::sort(row.begin(), row.end());
        }
    }

    std::size_t cost(const std::vector<std::size_t> &pos) const {
        std::size_t total = 0;
        for (std::size_t a = 0; a < adjacency.size(); ++a) {
            for (auto [b, w] : adjacency[a]) {
                if (a < b) {
                    total += w * (pos[a] > pos[b] ? pos[a] - pos[b] : pos[b] - pos[a]);
                }
            }
        }
        return total;
    }

    // Cost change from exchanging the positions of u and v.
    std::ptrdiff_t swap_delta(const std::vector<std::size_t> &pos, std::size_t u, std::size_t v) const {
        auto dist = [](std::size_t x, std::size_t y) {
            return static_cast<std::ptrdiff_t>(x > y ? x - y : y - x);
        };
        std::ptrdiff_t delta = 0;
        for (auto [x, w] : adjacency[u]) {
            if (x == v) {
                continue;
            }
            delta += static_cast<std::ptrdiff_t>(w) * (dist(pos[v], pos[x]) - dist(pos[u], pos[x]));
        }
        for (auto [x, w] : adjacency[v]) {
            if (x == u) {
                continue;
            }
            delta += static_cast<std::ptrdiff_t>(w) * (dist(pos[u], pos[x]) - dist(pos[v], pos[x]));
        }
        return delta;
    }
};

// Pairwise-exchange descent; only strict improvements are accepted.
inline std::size_t local_descent(const InteractionGraph &g, std::vector<std::size_t> &pos, std::size_t cost) {
    const std::size_t n = pos.size();
    const std::size_t window = n <= 64 ? n : 16;
    const int max_sweeps = n <= 64 ? 50 : 8;
    std::vector<std::size_t> at(n);
    for (std::size_t q = 0; q < n; ++q) {
        at[pos[q]] = q;
    }
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r = p + 1; r < n && r <= p + window; ++r) {
                const std::size_t u = at[p];
                const std::size_t v = at[r];
                const std::ptrdiff_t d = g.swap_delta(pos, u, v);
                if (d < 0) {
                    std::swap(pos[u], pos[v]);
                    std::swap(at[p], at[r]);
                    cost = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cost) + d);
                    improved = true;
                }
            }
        }
        if (!improved) {
            break;
        }
    }
    return cost;
}

// Linear arrangement grown from `start`, always appending the unplaced qubit
// most strongly coupled to the placed tail.
inline std::vector<std::size_t> greedy_chain(const InteractionGraph &g, std::size_t start) {
    const std::size_t n = g.adjacency.size();
    std::vector<std::size_t> pos(n, n);
    std::vector<double> pull(n, 0.0);
    std::size_t next = start;
    for (std::size_t placed = 0; placed < n; ++placed) {
        pos[next] = placed;
        for (auto [x, w] : g.adjacency[next]) {
            if (pos[x] == n) {
                pull[x] = pull[x] * 0.5 + static_cast<double>(w);
            }
        }
        for (std::size_t q = 0; q < n; ++q) {
            if (pos[q] == n && q != next) {
                pull[q] *= 0.5;
            }
        }
        std::size_t best = n;
        for (std::size_t q = 0; q < n; ++q) {
            if (pos[q] == n && (best == n || pull[q] > pull[best])) {
                best = q;
            }
        }
        next = best;
    }
    return pos;
}

} // namespace detail

/// Chain placement (logical qubit -> site) minimizing `routing_cost`.
///
/// Candidates are the identity, greedy chains from a few seeded starting
/// qubits, and random restarts; each is refined by pairwise-exchange descent.
/// The identity is kept unless another placement is strictly cheaper.
inline std::vector<std::size_t> permute_pass(const Circuit &c, std::uint64_t seed = 0) {
    const std::size_t n = c.n_qubits;
    detail::InteractionGraph g(c);
    std::vector<std::size_t> best(n);
    std::iota(best.begin(), best.end(), 0);
    std::size_t best_cost = g.cost(best);
    if (n <= 2 || best_cost == 0) {
        return best;
    }

    auto consider = [&](std::vector<std::size_t> pos) {
        std::size_t cost = detail::local_descent(g, pos, g.cost(pos));
        if (cost < best_cost) {
            best_cost = cost;
            best = std::move(pos);
        }
    };

    consider(best);
    Rng rng(seed);
    std::size_t max_degree_q = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (g.adjacency[q].size() > g.adjacency[max_degree_q].size()) {
            max_degree_q = q;
        }
    }
    if (n <= 256) {
        consider(detail::greedy_chain(g, 0));
        consider(detail::greedy_chain(g, max_degree_q));
        for (int r = 0; r < 2; ++r) {
            consider(detail::greedy_chain(g, rng.below(n)));
        }
    }
    return best;
}

} // namespace mpsbench
