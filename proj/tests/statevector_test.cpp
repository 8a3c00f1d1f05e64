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
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mpsbench/circuits.hpp"
#include "mpsbench/statevector.hpp"
#include "test_util.hpp"

namespace mpsbench {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(StateVector, ZeroState) {
    const StateVector sv = sv_run([] {
        Circuit c;
        c.n_qubits = 3;
        return c;
    }());
    EXPECT_EQ(sv.amplitude("000"), cplx(1.0, 0.0));
    for (std::size_t i = 1; i < 8; ++i) {
        EXPECT_EQ(sv.amplitudes()[i], cplx(0.0, 0.0));
    }
}

TEST(StateVector, BellPair) {
    const StateVector sv = sv_run(generate(CircuitClass::Ghz, 2, 1));
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(sv.amplitudes()[0] - h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sv.amplitudes()[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sv.amplitudes()[2]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sv.amplitudes()[3] - h), 0.0, 1e-15);
}

TEST(StateVector, LittleEndianBitstrings) {
    Circuit c;
    c.n_qubits = 3;
    c.gates.push_back(Gate::u(0, kPi, 0, kPi)); // X on qubit 0
    const StateVector sv = sv_run(c);
    EXPECT_NEAR(std::abs(sv.amplitude("100")), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(sv.amplitudes()[1]), 1.0, 1e-15);
    EXPECT_EQ(bitstring_to_index("011"), 6u);
    EXPECT_EQ(index_to_bitstring(6, 3), "011");
}

TEST(StateVector, MatchesReferenceOnRandomCircuits) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Circuit c = testing::random_circuit(7, 120, seed);
        const StateVector sv = sv_run(c);
        EXPECT_LT(testing::max_abs_diff(sv.amplitudes(), testing::reference_state(c)), 1e-12) << seed;
        EXPECT_NEAR(sv.norm_squared(), 1.0, 1e-12);
    }
}

TEST(StateVector, TwoQubitKernelMatchesCx) {
    const Circuit c = testing::random_circuit(5, 40, 3);
    StateVector a = sv_run(c);
    StateVector b = a;
    a.apply_cx(3, 1);
    b.apply_2q(3, 1, cx_matrix());
    EXPECT_LT(testing::max_abs_diff(a.amplitudes(), b.amplitudes()), 1e-15);
}

TEST(StateVector, MirrorReturnsToZero) {
    for (CircuitClass cls : kNativeClasses) {
        for (std::size_t n : {4, 8, 12}) {
            const StateVector sv = sv_run(mirror(generate(cls, n, 5)));
            EXPECT_NEAR(std::norm(sv.amplitudes()[0]), 1.0, 1e-12) << class_name(cls) << " " << n;
        }
    }
}

TEST(StateVector, Fidelity) {
    Circuit c;
    c.n_qubits = 2;
    const StateVector e0 = sv_run(c);
    c.gates.push_back(Gate::u(0, kPi, 0, kPi));
    const StateVector e1 = sv_run(c);
    EXPECT_DOUBLE_EQ(sv_fidelity(e0, e0), 1.0);
    EXPECT_NEAR(sv_fidelity(e0, e1), 0.0, 1e-30);
    const StateVector r = sv_run(testing::random_circuit(2, 10, 9));
    EXPECT_NEAR(sv_fidelity(r, r), 1.0, 1e-14);
    EXPECT_THROW(sv_fidelity(e0, StateVector(3)), std::invalid_argument);
}

TEST(StateVector, Cap) {
    EXPECT_THROW(StateVector(23), std::length_error);
    EXPECT_THROW(StateVector(0), std::invalid_argument);
    EXPECT_NO_THROW(StateVector(4, 4));
    EXPECT_THROW(StateVector(5, 4), std::length_error);
}

TEST(StateVector, SamplingFollowsBornRule) {
    const Circuit c = testing::random_circuit(3, 30, 11);
    const StateVector sv = sv_run(c);
    Rng rng(4);
    const auto hist = testing::histogram(sv.sample(20000, rng));
    std::vector<double> obs;
    std::vector<double> prob;
    for (std::size_t i = 0; i < 8; ++i) {
        const double p = std::norm(sv.amplitudes()[i]);
        if (p < 1e-3) {
            EXPECT_EQ(hist.count(testing::basis_string(i, 3)), 0u);
            continue;
        }
        prob.push_back(p);
        auto it = hist.find(testing::basis_string(i, 3));
        obs.push_back(it == hist.end() ? 0.0 : static_cast<double>(it->second));
    }
    double total = 0.0;
    double ptot = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        total += obs[i];
        ptot += prob[i];
    }
    for (double &p : prob) {
        p /= ptot;
    }
    EXPECT_GT(testing::chi_square_p(obs, prob, total), 1e-3);
}

TEST(StateVector, SamplingDeterministicUnderSeed) {
    const StateVector sv = sv_run(generate(CircuitClass::WState, 5, 1));
    Rng a(17);
    Rng b(17);
    EXPECT_EQ(sv.sample(50, a), sv.sample(50, b));
}

} // namespace
} // namespace mpsbench
