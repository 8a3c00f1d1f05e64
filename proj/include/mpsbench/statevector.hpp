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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpsbench/linalg.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/rng.hpp"

namespace mpsbench {

// Bitstring convention shared by every engine: character k is qubit k, and
// qubit k is bit k of the amplitude index (qubit 0 least significant).

inline std::size_t bitstring_to_index(std::string_view bits) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] == '1') {
            idx |= std::size_t{1} << k;
        } else if (bits[k] != '0') {
            throw std::invalid_argument("bitstring contains a character other than 0/1");
        }
    }
    return idx;
}

inline std::string index_to_bitstring(std::size_t idx, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t k = 0; k < n; ++k) {
        if ((idx >> k) & 1U) {
            s[k] = '1';
        }
    }
    return s;
}

inline constexpr std::size_t kDefaultStatevectorCap = 22;

/// Dense state of up to `kDefaultStatevectorCap` qubits.
class StateVector {
  public:
    explicit StateVector(std::size_t n, std::size_t cap = kDefaultStatevectorCap) : n_(n) {
        if (n == 0) {
            throw std::invalid_argument("statevector: need at least one qubit");
        }
        if (n > cap) {
            throw std::length_error("statevector: " + std::to_string(n) + " qubits exceeds cap of " +
                                    std::to_string(cap));
        }
        amps_.assign(std::size_t{1} << n, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    std::size_t num_qubits() const { return n_; }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    std::vector<cplx> &amplitudes() { return amps_; }

    cplx amplitude(std::string_view bits) const {
        if (bits.size() != n_) {
            throw std::invalid_argument("amplitude: bitstring length mismatch");
        }
        return amps_[bitstring_to_index(bits)];
    }

    double norm_squared() const {
        double s = 0.0;
        for (const cplx &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    void apply_1q(std::size_t q, const Mat2 &m) {
        const std::size_t stride = std::size_t{1} << q;
        const std::size_t dim = amps_.size();
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cplx a0 = amps_[i];
                const cplx a1 = amps_[i + stride];
                amps_[i] = m(0, 0) * a0 + m(0, 1) * a1;
                amps_[i + stride] = m(1, 0) * a0 + m(1, 1) * a1;
            }
        }
    }

    void apply_cx(std::size_t control, std::size_t target) {
        const std::size_t cm = std::size_t{1} << control;
        const std::size_t tm = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cm) && !(i & tm)) {
                std::swap(amps_[i], amps_[i | tm]);
            }
        }
    }

    /// Applies `m` to (a, b) with local index 2*bit_a + bit_b.
    void apply_2q(std::size_t a, std::size_t b, const Mat4 &m) {
        const std::size_t am = std::size_t{1} << a;
        const std::size_t bm = std::size_t{1} << b;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & (am | bm)) {
                continue;
            }
            const std::size_t idx[4] = {i, i | bm, i | am, i | am | bm};
            cplx v[4];
            for (int r = 0; r < 4; ++r) {
                v[r] = amps_[idx[r]];
            }
            for (int r = 0; r < 4; ++r) {
                amps_[idx[r]] = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2] + m(r, 3) * v[3];
            }
        }
    }

    void apply(const Gate &g) {
        switch (g.kind) {
        case GateKind::U:
            apply_1q(g.qubits[0], u_matrix(g.params[0], g.params[1], g.params[2]));
            break;
        case GateKind::CX:
            apply_cx(g.qubits[0], g.qubits[1]);
            break;
        case GateKind::Barrier:
        case GateKind::Measure:
            break;
        }
    }

    /// Independent draws from |amplitude|^2 by inverse-CDF lookup.
    std::vector<std::string> sample(std::size_t shots, Rng &rng) const {
        std::vector<double> cdf(amps_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            acc += std::norm(amps_[i]);
            cdf[i] = acc;
        }
        std::vector<std::string> out;
        out.reserve(shots);
        for (std::size_t s = 0; s < shots; ++s) {
            const double r = rng.uniform() * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
            const std::size_t idx =
                std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
            out.push_back(index_to_bitstring(idx, n_));
        }
        return out;
    }

  private:
    std::size_t n_;
    std::vector<cplx> amps_;
};

/// Runs every U and CX of `c` from |0...0>; measurements and barriers are ignored.
inline StateVector sv_run(const Circuit &c, std::size_t cap = kDefaultStatevectorCap) {
    StateVector sv(c.n_qubits, cap);
    for (const Gate &g : c.gates) {
        sv.apply(g);
    }
    return sv;
}

/// |<a|b>|^2
inline double sv_fidelity(const StateVector &a, const StateVector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("sv_fidelity: qubit count mismatch");
    }
    cplx overlap{0.0, 0.0};
    const auto &x = a.amplitudes();
    const auto &y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        overlap += std::conj(x[i]) * y[i];
    }
    return std::norm(overlap);
}

} // namespace mpsbench
