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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpsbench/linalg.hpp"
#include "mpsbench/passes.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/rng.hpp"
#include "mpsbench/statevector.hpp"

namespace mpsbench {

using Clock = std::chrono::steady_clock;

/// Convergence and method hyperparameters of the MPS engine.
struct MpsConfig {
    std::size_t bond_dimension = 64; ///< chi, the maximum number of kept singular values
    double cutoff = 1e-10;           ///< drop sigma_i with sigma_i / sigma_max < cutoff
    bool fuse = false;               ///< merge gates into <= 2-qubit blocks first
    bool permute = false;            ///< optimize the initial qubit -> site placement
    bool swap_split = true;          ///< route non-local gates with swaps left in place
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (bond_dimension < 1) {
            throw std::invalid_argument("bond_dimension must be >= 1");
        }
        if (!(cutoff >= 0.0 && cutoff < 1.0)) {
            throw std::invalid_argument("cutoff must lie in [0, 1)");
        }
    }

    bool operator==(const MpsConfig &) const = default;
};

/// Singular values below this fraction of the largest are treated as exact
/// zeros even at cutoff 0; they are rounding noise, not state content.
inline constexpr double kSingularValueFloor = 1e-14;

struct TruncationReport {
    double discarded_weight = 0.0;
    std::size_t new_bond = 0;
    std::size_t svd_count = 0;
};

/// Chain of rank-3 site tensors in mixed canonical form.
///
/// Sites are indexed by chain position; `qubit_order()[q]` gives the position
/// of logical qubit q. Every site left of the orthogonality center is
/// left-orthonormal and every site right of it right-orthonormal, so the
/// center tensor alone carries the norm.
class MpsState {
  public:
    explicit MpsState(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("MpsState: need at least one qubit");
        }
        sites_.resize(n);
        for (Site &s : sites_) {
            s.m[0] = MatX::Ones(1, 1);
            s.m[1] = MatX::Zero(1, 1);
        }
        pos_of_.resize(n);
        std::iota(pos_of_.begin(), pos_of_.end(), 0);
        logical_at_ = pos_of_;
    }

    std::size_t num_qubits() const { return sites_.size(); }
    double fidelity_estimate() const { return fidelity_; }
    std::size_t orthogonality_center() const { return center_; }
    std::size_t peak_bond() const { return peak_bond_; }
    std::size_t svd_count() const { return svd_count_; }
    const std::vector<std::size_t> &qubit_order() const { return pos_of_; }

    /// Bond dimensions at the n-1 cuts, in chain order.
    std::vector<std::size_t> bond_profile() const {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p + 1 < sites_.size(); ++p) {
            out.push_back(static_cast<std::size_t>(sites_[p].m[0].cols()));
        }
        return out;
    }

    /// Places logical qubits on the chain. Only meaningful before any gate,
    /// where every placement represents the same |0...0>.
    void set_qubit_order(const std::vector<std::size_t> &position) {
        if (touched_) {
            throw std::logic_error("set_qubit_order: state already evolved");
        }
        if (position.size() != sites_.size()) {
            throw std::invalid_argument("set_qubit_order: size mismatch");
        }
        std::vector<std::size_t> at(sites_.size(), sites_.size());
        for (std::size_t q = 0; q < position.size(); ++q) {
            if (position[q] >= sites_.size() || at[position[q]] != sites_.size()) {
                throw std::invalid_argument("set_qubit_order: not a permutation");
            }
            at[position[q]] = q;
        }
        pos_of_ = position;
        logical_at_ = std::move(at);
    }

    void apply_1q(std::size_t q, const Mat2 &u) {
        check_qubit(q);
        touched_ = true;
        Site &s = sites_[pos_of_[q]];
        MatX a0 = s.m[0];
        s.m[0] = u(0, 0) * a0 + u(0, 1) * s.m[1];
        s.m[1] = u(1, 0) * a0 + u(1, 1) * s.m[1];
    }

    /// Applies `m` to logical qubits (a, b) (local index 2*bit_a + bit_b).
    ///
    /// Non-adjacent pairs are first brought together by truncating SWAPs of
    /// neighbouring sites; `move_a` selects which qubit travels. With
    /// `cfg.swap_split` the travelled qubit stays at its new site, otherwise
    /// the swaps are undone immediately after the gate.
    TruncationReport apply_2q(std::size_t a, std::size_t b, const Mat4 &m, const MpsConfig &cfg, bool move_a = true) {
        check_qubit(a);
        check_qubit(b);
        if (a == b) {
            throw std::invalid_argument("apply_2q: qubits coincide");
        }
        touched_ = true;
        TruncationReport rep;
        const std::size_t mover = move_a ? a : b;
        const std::size_t other = move_a ? b : a;
        const std::size_t start = pos_of_[mover];
        std::vector<std::size_t> path;
        while (distance(mover, other) > 1) {
            const std::size_t pm = pos_of_[mover];
            const bool right = pos_of_[other] > pm;
            const std::size_t p = right ? pm : pm - 1;
            accumulate(rep, swap_sites(p, cfg, right));
            path.push_back(p);
        }
        const std::size_t pa = pos_of_[a];
        const std::size_t pb = pos_of_[b];
        const std::size_t p = std::min(pa, pb);
        const bool toward_right = pos_of_[mover] > start || (pos_of_[mover] == start && pa < pb);
        accumulate(rep, two_site(p, pa < pb ? m : exchange_qubits(m), cfg, toward_right));
        if (!cfg.swap_split) {
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                accumulate(rep, swap_sites(*it, cfg, pos_of_[mover] > start));
            }
        }
        return rep;
    }

    /// SWAP of two logical qubits, realized exactly by exchanging labels.
    void relabel_swap(std::size_t a, std::size_t b) {
        check_qubit(a);
        check_qubit(b);
        touched_ = true;
        std::swap(pos_of_[a], pos_of_[b]);
        logical_at_[pos_of_[a]] = a;
        logical_at_[pos_of_[b]] = b;
    }

    TruncationReport apply_op(const FusedOp &op, const MpsConfig &cfg, bool move_a = true) {
        switch (op.kind) {
        case FusedOp::Kind::One:
            apply_1q(op.a, op.m1);
            return {};
        case FusedOp::Kind::Two:
            return apply_2q(op.a, op.b, op.m2, cfg, move_a);
        case FusedOp::Kind::Swap:
            relabel_swap(op.a, op.b);
            return {};
        }
        return {};
    }

    /// Applies U or CX; barriers and measurements are no-ops here.
    TruncationReport apply_gate(const Gate &g, const MpsConfig &cfg) {
        switch (g.kind) {
        case GateKind::U:
            apply_1q(g.qubits[0], u_matrix(g.params[0], g.params[1], g.params[2]));
            return {};
        case GateKind::CX:
            return apply_2q(g.qubits[0], g.qubits[1], cx_matrix(), cfg);
        case GateKind::Barrier:
        case GateKind::Measure:
            return {};
        }
        return {};
    }

    /// <bits|psi>, with bits[q] the value of logical qubit q.
    cplx amplitude(std::string_view bits) const {
        if (bits.size() != sites_.size()) {
            throw std::invalid_argument("amplitude: bitstring length mismatch");
        }
        MatX v = MatX::Ones(1, 1);
        for (std::size_t p = 0; p < sites_.size(); ++p) {
            const char c = bits[logical_at_[p]];
            if (c != '0' && c != '1') {
                throw std::invalid_argument("amplitude: bitstring contains a character other than 0/1");
            }
            v = v * sites_[p].m[c == '1' ? 1 : 0];
        }
        return v(0, 0);
    }

    /// <psi|psi> by full contraction of the chain.
    double norm_squared() const {
        MatX env = MatX::Ones(1, 1);
        for (const Site &s : sites_) {
            env = s.m[0].adjoint() * env * s.m[0] + s.m[1].adjoint() * env * s.m[1];
        }
        return env(0, 0).real();
    }

    /// Dense amplitudes in the shared little-endian convention.
    StateVector to_statevector(std::size_t cap = kDefaultStatevectorCap) const {
        StateVector sv(sites_.size(), cap);
        std::vector<std::pair<std::size_t, MatX>> partial{{0, MatX::Ones(1, 1)}};
        for (std::size_t p = 0; p < sites_.size(); ++p) {
            std::vector<std::pair<std::size_t, MatX>> next;
            next.reserve(partial.size() * 2);
            const std::size_t bit = std::size_t{1} << logical_at_[p];
            for (const auto &[idx, v] : partial) {
                next.emplace_back(idx, v * sites_[p].m[0]);
                next.emplace_back(idx | bit, v * sites_[p].m[1]);
            }
            partial = std::move(next);
        }
        for (const auto &[idx, v] : partial) {
            sv.amplitudes()[idx] = v(0, 0);
        }
        return sv;
    }

    /// Sequential conditional sampling along the chain. When `deadline` is
    /// given it is polled every 64 shots and sampling stops early once it has
    /// passed; the caller detects this from the returned size.
    std::vector<std::string> sample(std::size_t shots, Rng &rng,
                                    std::optional<Clock::time_point> deadline = std::nullopt) {
        move_center_to(0);
        const std::size_t n = sites_.size();
        std::vector<std::string> out;
        out.reserve(shots);
        Eigen::RowVectorXcd v;
        Eigen::RowVectorXcd w0;
        Eigen::RowVectorXcd w1;
        for (std::size_t s = 0; s < shots; ++s) {
            if (deadline && s % 64 == 0 && Clock::now() >= *deadline) {
                break;
            }
            std::string bits(n, '0');
            v = Eigen::RowVectorXcd::Ones(1);
            for (std::size_t p = 0; p < n; ++p) {
                w0.noalias() = v * sites_[p].m[0];
                w1.noalias() = v * sites_[p].m[1];
                const double n0 = w0.squaredNorm();
                const double n1 = w1.squaredNorm();
                const bool one = rng.uniform() * (n0 + n1) >= n0;
                if (one) {
                    bits[logical_at_[p]] = '1';
                    v = w1 / std::sqrt(n1);
                } else {
                    v = w0 / std::sqrt(n0);
                }
            }
            out.push_back(std::move(bits));
        }
        return out;
    }

    void move_center_to(std::size_t target) {
        while (center_ < target) {
            shift_center_right();
        }
        while (center_ > target) {
            shift_center_left();
        }
    }

  private:
    struct Site {
        MatX m[2]; // left bond x right bond, one per physical value
    };

    std::vector<Site> sites_;
    std::vector<std::size_t> pos_of_;
    std::vector<std::size_t> logical_at_;
    std::size_t center_ = 0;
    double fidelity_ = 1.0;
    std::size_t peak_bond_ = 1;
    std::size_t svd_count_ = 0;
    bool touched_ = false;

    void check_qubit(std::size_t q) const {
        if (q >= sites_.size()) {
            throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
        }
    }

    std::size_t distance(std::size_t a, std::size_t b) const {
        const std::size_t pa = pos_of_[a];
        const std::size_t pb = pos_of_[b];
        return pa > pb ? pa - pb : pb - pa;
    }

    static void accumulate(TruncationReport &into, const TruncationReport &r) {
        into.discarded_weight += r.discarded_weight;
        into.new_bond = r.new_bond;
        into.svd_count += r.svd_count;
    }

    TruncationReport swap_sites(std::size_t p, const MpsConfig &cfg, bool center_right) {
        TruncationReport r = two_site(p, swap_matrix(), cfg, center_right);
        const std::size_t qa = logical_at_[p];
        const std::size_t qb = logical_at_[p + 1];
        logical_at_[p] = qb;
        logical_at_[p + 1] = qa;
        pos_of_[qa] = p + 1;
        pos_of_[qb] = p;
        return r;
    }

    void shift_center_right() {
        Site &s = sites_[center_];
        Site &t = sites_[center_ + 1];
        const Eigen::Index l = s.m[0].rows();
        const Eigen::Index r = s.m[0].cols();
        MatX stacked(2 * l, r);
        stacked << s.m[0], s.m[1];
        Eigen::HouseholderQR<MatX> qr(stacked);
        const Eigen::Index k = std::min<Eigen::Index>(2 * l, r);
        MatX q = qr.householderQ() * MatX::Identity(2 * l, k);
        MatX rr = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
        s.m[0] = q.topRows(l);
        s.m[1] = q.bottomRows(l);
        t.m[0] = rr * t.m[0];
        t.m[1] = rr * t.m[1];
        ++center_;
    }

    void shift_center_left() {
        Site &s = sites_[center_];
        Site &t = sites_[center_ - 1];
        const Eigen::Index l = s.m[0].rows();
        const Eigen::Index r = s.m[0].cols();
        MatX joined(l, 2 * r);
        joined << s.m[0], s.m[1];
        MatX adj = joined.adjoint();
        Eigen::HouseholderQR<MatX> qr(adj);
        const Eigen::Index k = std::min<Eigen::Index>(2 * r, l);
        MatX q = qr.householderQ() * MatX::Identity(2 * r, k);
        MatX rr = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
        MatX qh = q.adjoint();
        s.m[0] = qh.leftCols(r);
        s.m[1] = qh.rightCols(r);
        MatX rh = rr.adjoint();
        t.m[0] = t.m[0] * rh;
        t.m[1] = t.m[1] * rh;
        --center_;
    }

    // Contracts sites p and p+1, applies m, and splits by a truncated SVD.
    // The singular values go to the right site when center_right.
    TruncationReport two_site(std::size_t p, const Mat4 &m, const MpsConfig &cfg, bool center_right) {
        if (center_ < p) {
            move_center_to(p);
        } else if (center_ > p + 1) {
            move_center_to(p + 1);
        }
        Site &left = sites_[p];
        Site &right = sites_[p + 1];
        const Eigen::Index l = left.m[0].rows();
        const Eigen::Index r = right.m[0].cols();

        MatX theta[2][2];
        for (int s1 = 0; s1 < 2; ++s1) {
            for (int s2 = 0; s2 < 2; ++s2) {
                theta[s1][s2].noalias() = left.m[s1] * right.m[s2];
            }
        }
        MatX big = MatX::Zero(2 * l, 2 * r);
        for (int s1 = 0; s1 < 2; ++s1) {
            for (int s2 = 0; s2 < 2; ++s2) {
                auto blk = big.block(s1 * l, s2 * r, l, r);
                for (int t1 = 0; t1 < 2; ++t1) {
                    for (int t2 = 0; t2 < 2; ++t2) {
                        const cplx g = m(2 * s1 + s2, 2 * t1 + t2);
                        if (g != cplx{0.0, 0.0}) {
                            blk += g * theta[t1][t2];
                        }
                    }
                }
            }
        }

        const Svd dec = svd(big);
        ++svd_count_;
        const Eigen::Index full = dec.s.size();
        const double smax = full > 0 ? dec.s(0) : 0.0;
        const double threshold = smax * std::max(cfg.cutoff, kSingularValueFloor);
        Eigen::Index keep = 0;
        while (keep < full && keep < static_cast<Eigen::Index>(cfg.bond_dimension) &&
               dec.s(keep) >= threshold && dec.s(keep) > 0.0) {
            ++keep;
        }
        keep = std::max<Eigen::Index>(keep, 1);

        const double total = dec.s.squaredNorm();
        const double kept = dec.s.head(keep).squaredNorm();
        TruncationReport rep;
        rep.svd_count = 1;
        rep.new_bond = static_cast<std::size_t>(keep);
        if (total > 0.0) {
            const double retained = std::min(1.0, kept / total);
            rep.discarded_weight = 1.0 - retained;
            fidelity_ *= retained;
        }
        const double scale = kept > 0.0 ? 1.0 / std::sqrt(kept) : 1.0;
        const VecR sv = dec.s.head(keep) * scale;

        if (center_right) {
            const MatX us = dec.u.leftCols(keep);
            const MatX svh = sv.asDiagonal() * dec.vh.topRows(keep);
            left.m[0] = us.topRows(l);
            left.m[1] = us.bottomRows(l);
            right.m[0] = svh.leftCols(r);
            right.m[1] = svh.rightCols(r);
            center_ = p + 1;
        } else {
            const MatX us = dec.u.leftCols(keep) * sv.asDiagonal();
            const MatX vh = dec.vh.topRows(keep);
            left.m[0] = us.topRows(l);
            left.m[1] = us.bottomRows(l);
            right.m[0] = vh.leftCols(r);
            right.m[1] = vh.rightCols(r);
            center_ = p;
        }
        peak_bond_ = std::max(peak_bond_, static_cast<std::size_t>(keep));
        return rep;
    }
};

struct RunResult {
    std::vector<std::string> samples;
    double fidelity_estimate = 1.0;
    std::size_t peak_bond = 1;
    double wall_time = 0.0;
    std::size_t gate_count_applied = 0;
    std::size_t svd_count = 0;
    bool timed_out = false;
    std::optional<MpsState> state; ///< final state, when requested
};

namespace detail {

// For every two-qubit op, whether logical qubit `a` should be the one to move:
// prefer the qubit that the next two-qubit op also touches.
inline std::vector<bool> mover_hints(const FusedCircuit &fc) {
    std::vector<bool> move_a(fc.ops.size(), true);
    std::ptrdiff_t next = -1;
    for (std::size_t i = fc.ops.size(); i-- > 0;) {
        const FusedOp &op = fc.ops[i];
        if (op.kind != FusedOp::Kind::Two) {
            continue;
        }
        if (next >= 0) {
            const FusedOp &nx = fc.ops[static_cast<std::size_t>(next)];
            const bool has_a = nx.a == op.a || nx.b == op.a;
            const bool has_b = nx.a == op.b || nx.b == op.b;
            move_a[i] = has_a || !has_b;
        }
        next = static_cast<std::ptrdiff_t>(i);
    }
    return move_a;
}

} // namespace detail

/// Simulates `circuit` and draws `shots` samples.
///
/// Runs the fuse and permute pre-passes when enabled, then streams the blocks
/// through the state. The deadline is polled before every block and every 64
/// shots; on expiry the result is flagged `timed_out` and carries whatever
/// was produced.
inline RunResult run(const Circuit &circuit, const MpsConfig &cfg, std::size_t shots, Clock::time_point deadline,
                     bool keep_state = false) {
    const auto t0 = Clock::now();
    cfg.validate();
    RunResult res;
    auto finish = [&](MpsState *state) {
        res.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
        if (state) {
            res.fidelity_estimate = state->fidelity_estimate();
            res.peak_bond = state->peak_bond();
            res.svd_count = state->svd_count();
            if (keep_state) {
                res.state = std::move(*state);
            }
        }
        return std::move(res);
    };
    if (Clock::now() >= deadline) {
        res.timed_out = true;
        return finish(nullptr);
    }

    const FusedCircuit program = cfg.fuse ? fuse_pass(circuit) : lower(circuit);
    MpsState state(circuit.n_qubits);
    if (cfg.permute) {
        state.set_qubit_order(permute_pass(circuit, cfg.rng_seed));
    }
    const std::vector<bool> hints = detail::mover_hints(program);
    for (std::size_t i = 0; i < program.ops.size(); ++i) {
        if (Clock::now() >= deadline) {
            res.timed_out = true;
            return finish(&state);
        }
        state.apply_op(program.ops[i], cfg, hints[i]);
        ++res.gate_count_applied;
    }
    Rng rng(cfg.rng_seed);
    res.samples = state.sample(shots, rng, deadline);
    res.timed_out = res.samples.size() < shots;
    return finish(&state);
}

inline RunResult run(const Circuit &circuit, const MpsConfig &cfg, std::size_t shots, double deadline_seconds,
                     bool keep_state = false) {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(std::max(0.0, deadline_seconds)));
    return run(circuit, cfg, shots, deadline, keep_state);
}

} // namespace mpsbench
