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
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpsbench/qasm.hpp"
#include "mpsbench/rng.hpp"

namespace mpsbench {

/// Natively generated benchmark families. The file-only families (ae, qwalk,
/// qnn) have no enumerator; their QASM files run through the generic path.
enum class CircuitClass {
    Ghz,
    WState,
    GraphState,
    Qft,
    QftEntangled,
    QpeExact,
    QpeInexact,
    RealAmp,
    Su2Rand,
    Random,
};

inline constexpr std::array<CircuitClass, 10> kNativeClasses = {
    CircuitClass::Ghz,     CircuitClass::WState,       CircuitClass::GraphState, CircuitClass::Qft,
    CircuitClass::QftEntangled, CircuitClass::QpeExact, CircuitClass::QpeInexact, CircuitClass::RealAmp,
    CircuitClass::Su2Rand, CircuitClass::Random,
};

inline constexpr std::array<std::string_view, 3> kFileOnlyClasses = {"ae", "qwalk", "qnn"};

inline std::string_view class_name(CircuitClass c) {
    switch (c) {
    case CircuitClass::Ghz:
        return "ghz";
    case CircuitClass::WState:
        return "wstate";
    case CircuitClass::GraphState:
        return "graphstate";
    case CircuitClass::Qft:
        return "qft";
    case CircuitClass::QftEntangled:
        return "qftentangled";
    case CircuitClass::QpeExact:
        return "qpeexact";
    case CircuitClass::QpeInexact:
        return "qpeinexact";
    case CircuitClass::RealAmp:
        return "realamp";
    case CircuitClass::Su2Rand:
        return "su2rand";
    case CircuitClass::Random:
        return "random";
    }
    return "?";
}

inline std::optional<CircuitClass> parse_class(std::string_view name) {
    for (CircuitClass c : kNativeClasses) {
        if (class_name(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

/// Entangling pattern of the realamp/su2rand ansatz layers.
enum class Entanglement { Full, Linear, ReverseLinear };

struct GeneratorOptions {
    std::size_t graph_degree = 3;
    std::size_t ansatz_reps = 3;
    Entanglement entanglement = Entanglement::ReverseLinear;
    double angle_eps = kDefaultAngleEps;
};

/// Appends gates in the U/CX basis. Standard gates are written through their
/// usual decompositions; global phases are not tracked.
class CircuitBuilder {
  public:
    explicit CircuitBuilder(std::size_t n) { c_.n_qubits = n; }

    static constexpr double pi = std::numbers::pi;

    void u(std::size_t q, double t, double p, double l) { c_.gates.push_back(Gate::u(idx(q), t, p, l)); }
    void h(std::size_t q) { u(q, pi / 2, 0, pi); }
    void x(std::size_t q) { u(q, pi, 0, pi); }
    void ry(std::size_t q, double t) { u(q, t, 0, 0); }
    void phase(std::size_t q, double l) { u(q, 0, 0, l); }
    void cx(std::size_t c, std::size_t t) { c_.gates.push_back(Gate::cx(idx(c), idx(t))); }

    void cz(std::size_t a, std::size_t b) {
        h(b);
        cx(a, b);
        h(b);
    }

    /// Controlled phase diag(1, 1, 1, e^{i theta}).
    void cp(std::size_t c, std::size_t t, double theta) {
        phase(c, theta / 2);
        cx(c, t);
        phase(t, -theta / 2);
        cx(c, t);
        phase(t, theta / 2);
    }

    void swap(std::size_t a, std::size_t b) {
        cx(a, b);
        cx(b, a);
        cx(a, b);
    }

    /// Haar-distributed single-qubit unitary (up to global phase).
    void haar(std::size_t q, Rng &rng) {
        const double theta = 2.0 * std::acos(std::sqrt(rng.uniform()));
        const double phi = rng.uniform(0, 2 * pi);
        const double lambda = rng.uniform(0, 2 * pi);
        u(q, theta, phi, lambda);
    }

    /// QFT on `qubits` (qubits[0] least significant), including the final
    /// swap network: |x> -> N^-1/2 sum_y exp(2 pi i x y / N) |y>.
    void qft(const std::vector<std::size_t> &qubits) {
        const std::size_t m = qubits.size();
        for (std::size_t jj = m; jj-- > 0;) {
            h(qubits[jj]);
            for (std::size_t kk = jj; kk-- > 0;) {
                cp(qubits[jj], qubits[kk], pi / std::ldexp(1.0, static_cast<int>(jj - kk)));
            }
        }
        for (std::size_t i = 0; i < m / 2; ++i) {
            swap(qubits[i], qubits[m - 1 - i]);
        }
    }

    void append(const std::vector<Gate> &gates) { c_.gates.insert(c_.gates.end(), gates.begin(), gates.end()); }

    std::size_t size() const { return c_.gates.size(); }
    std::vector<Gate> &gates() { return c_.gates; }

    /// Sanitizes, appends terminal measurements on every qubit, and labels.
    Circuit finish(std::string name, std::optional<std::uint64_t> seed, double angle_eps) {
        Circuit out = sanitize(c_, angle_eps);
        out.n_clbits = out.n_qubits;
        for (std::size_t q = 0; q < out.n_qubits; ++q) {
            out.gates.push_back(Gate::measure(idx(q), idx(q)));
        }
        out.name = std::move(name);
        out.seed = seed;
        return out;
    }

  private:
    Circuit c_;
    static std::uint32_t idx(std::size_t q) { return static_cast<std::uint32_t>(q); }
};

namespace detail {

/// Seeded random simple graph with (nearly) uniform degree via the pairing
/// model. Falls back to the complete graph when n <= degree; when n*degree is
/// odd one vertex keeps degree-1.
inline std::vector<std::pair<std::size_t, std::size_t>> random_regular_graph(std::size_t n, std::size_t degree,
                                                                             Rng &rng) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    if (n <= degree) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                edges.emplace_back(a, b);
            }
        }
        return edges;
    }
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t k = 0; k < degree; ++k) {
            stubs.push_back(v);
        }
    }
    if (stubs.size() % 2 == 1) {
        stubs.pop_back();
    }
    for (int attempt = 0; attempt < 10000; ++attempt) {
        rng.shuffle(stubs);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        bool simple = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            auto a = stubs[i];
            auto b = stubs[i + 1];
            if (a == b) {
                simple = false;
                break;
            }
            if (a > b) {
                std::swap(a, b);
            }
            if (!seen.insert({a, b}).second) {
                simple = false;
                break;
            }
        }
        if (simple) {
            return {seen.begin(), seen.end()};
        }
    }
    throw std::runtime_error("random_regular_graph: pairing model did not converge");
}

// Binary fraction 0.b_1 b_2 ... b_m (+ 2^-(m+1) when inexact), scaled by 2^i,
// modulo 1, evaluated from the bit list to keep precision for large m.
inline double scaled_fraction(const std::vector<int> &bits, std::size_t i, bool inexact) {
    const std::size_t m = bits.size();
    double v = 0.0;
    for (std::size_t j = 1; i + j <= m && j <= 60; ++j) {
        if (bits[i + j - 1]) {
            v += std::ldexp(1.0, -static_cast<int>(j));
        }
    }
    if (inexact && m + 1 - i <= 1000) {
        v += std::ldexp(1.0, -static_cast<int>(m + 1 - i));
    }
    return v;
}

inline void ansatz_entangle(CircuitBuilder &b, std::size_t n, Entanglement e) {
    switch (e) {
    case Entanglement::Full:
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                b.cx(i, j);
            }
        }
        break;
    case Entanglement::Linear:
        for (std::size_t i = 0; i + 1 < n; ++i) {
            b.cx(i, i + 1);
        }
        break;
    case Entanglement::ReverseLinear:
        for (std::size_t i = n - 1; i-- > 0;) {
            b.cx(i, i + 1);
        }
        break;
    }
}

inline void random_two_qubit(CircuitBuilder &b, std::size_t p, std::size_t q, Rng &rng) {
    constexpr double tau = 2.0 * std::numbers::pi;
    b.haar(p, rng);
    b.haar(q, rng);
    b.cx(p, q);
    b.phase(p, rng.uniform(0, tau));
    b.ry(q, rng.uniform(0, tau));
    b.cx(q, p);
    b.ry(q, rng.uniform(0, tau));
    b.cx(p, q);
    b.haar(p, rng);
    b.haar(q, rng);
}

// Haar layer, random CX network (a linear reversible permutation), then
// random phases on random parities of the block.
inline void random_block(CircuitBuilder &b, const std::vector<std::size_t> &qs, Rng &rng) {
    constexpr double tau = 2.0 * std::numbers::pi;
    const std::size_t k = qs.size();
    for (std::size_t q : qs) {
        b.haar(q, rng);
    }
    for (std::size_t r = 0; r < 2 * k; ++r) {
        const std::size_t a = rng.below(k);
        std::size_t c = rng.below(k - 1);
        if (c >= a) {
            ++c;
        }
        b.cx(qs[a], qs[c]);
    }
    for (std::size_t r = 0; r < k; ++r) {
        std::vector<std::size_t> subset;
        for (std::size_t q : qs) {
            if (rng.below(2) == 1) {
                subset.push_back(q);
            }
        }
        if (subset.empty()) {
            subset.push_back(qs[rng.below(k)]);
        }
        for (std::size_t i = 0; i + 1 < subset.size(); ++i) {
            b.cx(subset[i], subset.back());
        }
        b.phase(subset.back(), rng.uniform(0, tau));
        for (std::size_t i = subset.size() - 1; i-- > 0;) {
            b.cx(subset[i], subset.back());
        }
    }
}

} // namespace detail

inline std::size_t min_qubits(CircuitClass) { return 2; }

/// Builds one benchmark instance as a sanitized U/CX circuit ending in a
/// measurement of every qubit. Pure in (cls, n, seed, opts).
inline Circuit generate(CircuitClass cls, std::size_t n, std::uint64_t seed, const GeneratorOptions &opts = {}) {
    if (n < min_qubits(cls)) {
        throw std::invalid_argument(std::string(class_name(cls)) + ": needs at least " +
                                    std::to_string(min_qubits(cls)) + " qubits");
    }
    constexpr double pi = std::numbers::pi;
    constexpr double tau = 2.0 * pi;
    Rng rng(seed);
    CircuitBuilder b(n);
    std::vector<std::size_t> all(n);
    for (std::size_t q = 0; q < n; ++q) {
        all[q] = q;
    }

    switch (cls) {
    case CircuitClass::Ghz:
        b.h(0);
        for (std::size_t q = 0; q + 1 < n; ++q) {
            b.cx(q, q + 1);
        }
        break;

    case CircuitClass::WState:
        // Amplitude is handed down the chain from qubit n-1 by controlled
        // rotations, then a CX cascade leaves exactly one excitation.
        b.x(n - 1);
        for (std::size_t m = 1; m < n; ++m) {
            const std::size_t i = n - m;
            const std::size_t j = n - m - 1;
            const double theta = std::acos(std::sqrt(1.0 / static_cast<double>(n - m + 1)));
            b.ry(j, -theta);
            b.cz(i, j);
            b.ry(j, theta);
        }
        for (std::size_t k = n - 1; k >= 1; --k) {
            b.cx(k - 1, k);
        }
        break;

    case CircuitClass::GraphState: {
        for (std::size_t q = 0; q < n; ++q) {
            b.h(q);
        }
        for (auto [a, c] : detail::random_regular_graph(n, opts.graph_degree, rng)) {
            b.cz(a, c);
        }
        break;
    }

    case CircuitClass::Qft:
        b.qft(all);
        break;

    case CircuitClass::QftEntangled:
        b.h(0);
        for (std::size_t q = 0; q + 1 < n; ++q) {
            b.cx(q, q + 1);
        }
        b.qft(all);
        break;

    case CircuitClass::QpeExact:
    case CircuitClass::QpeInexact: {
        const bool inexact = cls == CircuitClass::QpeInexact;
        const std::size_t m = n - 1;
        const std::size_t target = n - 1;
        std::vector<int> bits(m);
        for (int &bit : bits) {
            bit = static_cast<int>(rng.below(2));
        }
        b.x(target);
        for (std::size_t q = 0; q < m; ++q) {
            b.h(q);
        }
        for (std::size_t q = 0; q < m; ++q) {
            b.cp(q, target, tau * detail::scaled_fraction(bits, q, inexact));
        }
        CircuitBuilder fwd(n);
        fwd.qft(std::vector<std::size_t>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m)));
        Circuit tmp;
        tmp.n_qubits = n;
        tmp.gates = std::move(fwd.gates());
        b.append(invert(tmp).gates);
        break;
    }

    case CircuitClass::RealAmp:
    case CircuitClass::Su2Rand: {
        const bool su2 = cls == CircuitClass::Su2Rand;
        auto rotation_layer = [&] {
            for (std::size_t q = 0; q < n; ++q) {
                b.ry(q, rng.uniform(0, tau));
                if (su2) {
                    b.phase(q, rng.uniform(0, tau));
                }
            }
        };
        for (std::size_t r = 0; r < opts.ansatz_reps; ++r) {
            rotation_layer();
            detail::ansatz_entangle(b, n, opts.entanglement);
        }
        rotation_layer();
        break;
    }

    case CircuitClass::Random: {
        const std::size_t layers = 2 * n;
        for (std::size_t layer = 0; layer < layers; ++layer) {
            std::vector<std::size_t> order = all;
            rng.shuffle(order);
            std::size_t pos = 0;
            while (pos < n) {
                const std::size_t size = 1 + rng.below(std::min<std::size_t>(4, n - pos));
                std::vector<std::size_t> block(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                               order.begin() + static_cast<std::ptrdiff_t>(pos + size));
                pos += size;
                if (size == 1) {
                    b.haar(block[0], rng);
                } else if (size == 2) {
                    detail::random_two_qubit(b, block[0], block[1], rng);
                } else {
                    detail::random_block(b, block, rng);
                }
            }
        }
        break;
    }
    }
    return b.finish(std::string(class_name(cls)), seed, opts.angle_eps);
}

/// Forward part, a full-width barrier, the inverse, and terminal measurements.
inline Circuit mirror(const Circuit &c) {
    const Circuit fwd = strip_measures(c);
    Circuit out = fwd;
    out.gates.push_back(Gate::barrier());
    const Circuit back = invert(fwd);
    out.gates.insert(out.gates.end(), back.gates.begin(), back.gates.end());
    out.n_clbits = std::max(out.n_clbits, out.n_qubits);
    for (std::size_t q = 0; q < out.n_qubits; ++q) {
        out.gates.push_back(Gate::measure(static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q)));
    }
    if (!out.name.empty()) {
        out.name += "_mirror";
    }
    return out;
}

/// Sizes of the quasi-logarithmic grid 4, 6, 8, 12, ..., 768, 1024 (then
/// continuing x1.5 / x4/3) that fall within [n_min, n_max].
inline std::vector<std::size_t> qubit_grid(std::size_t n_min, std::size_t n_max) {
    if (n_min < 2 || n_min > n_max) {
        throw std::invalid_argument("qubit_grid: need 2 <= n_min <= n_max");
    }
    std::vector<std::size_t> out;
    std::size_t a = 4;
    std::size_t b = 6;
    while (a <= n_max) {
        if (a >= n_min) {
            out.push_back(a);
        }
        if (b >= n_min && b <= n_max) {
            out.push_back(b);
        }
        a *= 2;
        b *= 2;
    }
    return out;
}

} // namespace mpsbench
