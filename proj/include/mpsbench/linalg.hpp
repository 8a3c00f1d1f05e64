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
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#include <lapacke.h>

namespace mpsbench {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;

/// 2x2 matrix of U(theta, phi, lambda).
inline Mat2 u_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Mat2 m;
    m(0, 0) = c;
    m(0, 1) = -std::polar(1.0, lambda) * s;
    m(1, 0) = std::polar(1.0, phi) * s;
    m(1, 1) = std::polar(1.0, phi + lambda) * c;
    return m;
}

// Two-qubit operators act on (a, b) with basis index 2*bit_a + bit_b.

/// CX with the control on the first (high) qubit of the pair.
inline Mat4 cx_matrix() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

/// CX with the control on the second (low) qubit of the pair.
inline Mat4 cx_reversed_matrix() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(2, 2) = m(1, 3) = m(3, 1) = 1.0;
    return m;
}

inline Mat4 swap_matrix() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

inline Mat4 kron(const Mat2 &hi, const Mat2 &lo) {
    Mat4 m;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            m.block<2, 2>(2 * a, 2 * b) = hi(a, b) * lo;
        }
    }
    return m;
}

/// Re-expresses an operator on (a, b) as one on (b, a).
inline Mat4 exchange_qubits(const Mat4 &m) {
    const Mat4 s = swap_matrix();
    return s * m * s;
}

struct Svd {
    MatX u;
    VecR s; // descending
    MatX vh;
    int backend = 0; // 0 gesdd, 1 gesvd, 2 Jacobi
};

namespace detail {

inline bool svd_ok(const Svd &r) {
    return r.s.allFinite() && r.u.allFinite() && r.vh.allFinite();
}

inline bool lapack_svd(const MatX &a, Svd &out, bool divide_and_conquer) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    MatX work = a;
    out.u.resize(m, k);
    out.vh.resize(k, n);
    out.s.resize(k);
    auto *pa = reinterpret_cast<lapack_complex_double *>(work.data());
    auto *pu = reinterpret_cast<lapack_complex_double *>(out.u.data());
    auto *pv = reinterpret_cast<lapack_complex_double *>(out.vh.data());
    lapack_int info = 0;
    if (divide_and_conquer) {
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, pa, m, out.s.data(), pu, m, pv, k);
    } else {
        std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, k - 1)));
        info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, pa, m, out.s.data(), pu, m, pv, k,
                              superb.data());
    }
    return info == 0 && svd_ok(out);
}

} // namespace detail

/// Thin SVD a = u * diag(s) * vh.
///
/// LAPACK zgesdd first, zgesvd when divide-and-conquer fails to converge,
/// and a one-sided Jacobi SVD as the last resort for ill-conditioned input.
inline Svd svd(const MatX &a) {
    Svd r;
    if (detail::lapack_svd(a, r, true)) {
        r.backend = 0;
        return r;
    }
    if (detail::lapack_svd(a, r, false)) {
        r.backend = 1;
        return r;
    }
    Eigen::JacobiSVD<MatX> jac(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.u = jac.matrixU();
    r.s = jac.singularValues();
    r.vh = jac.matrixV().adjoint();
    r.backend = 2;
    if (!detail::svd_ok(r)) {
        throw std::runtime_error("svd: no backend produced a finite decomposition");
    }
    return r;
}

} // namespace mpsbench
