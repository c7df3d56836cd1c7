// Copyright 2026 The nml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference implementations used only by the tests. They share
// no code with the library beyond Eigen.

#ifndef NML_TESTS_ORACLES_HPP
#define NML_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Pauli string with character k acting on qubit k (bit k of the basis index).
/// Kronecker products put the last factor on the lowest bit, so the string is
/// folded from the highest qubit down.
inline CMatrix pauli_string(const std::string &s) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int k = static_cast<int>(s.size()) - 1; k >= 0; --k) {
        CMatrix f;
        switch (s[k]) {
            case 'X':
                f = pauli_x();
                break;
            case 'Y':
                f = pauli_y();
                break;
            case 'Z':
                f = pauli_z();
                break;
            default:
                f = CMatrix::Identity(2, 2);
        }
        out = kron(out, f);
    }
    return out;
}

/// Z_i Z_j on n qubits.
inline CMatrix zz(int i, int j, int n) {
    std::string s(n, 'I');
    s[i] = 'Z';
    s[j] = 'Z';
    return pauli_string(s);
}

inline CMatrix x_site(int i, int n) {
    std::string s(n, 'I');
    s[i] = 'X';
    return pauli_string(s);
}

/// exp(beta s O / 2) / sqrt(2 cosh beta) through the matrix exponential.
inline CMatrix kraus(const CMatrix &op, double beta, int s) {
    CMatrix gen = (0.5 * beta * s) * op;
    CMatrix e = gen.exp();
    return e / std::sqrt(2.0 * std::cosh(beta));
}

inline CVector plus_state(int n) {
    int dim = 1 << n;
    return CVector::Constant(dim, Complex(std::pow(2.0, -0.5 * n), 0.0));
}

/// Sum over both outcomes of M rho M^dagger.
inline CMatrix dephase(const CMatrix &rho, const CMatrix &op, double beta) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (int s : {-1, 1}) {
        CMatrix m = kraus(op, beta, s);
        out += m * rho * m.adjoint();
    }
    return out;
}

/// Squared Uhlmann fidelity through the Schur based matrix square root.
inline double fidelity(const CMatrix &rho, const CMatrix &sigma) {
    CMatrix r = rho.sqrt();
    CMatrix inner = r * sigma * r;
    CMatrix root = inner.sqrt();
    double t = root.trace().real();
    return t * t;
}

/// exp(t M) by a truncated Taylor series with scaling and squaring.
inline CMatrix taylor_exp(const CMatrix &m, double t) {
    CMatrix a = t * m;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm > 0.25) {
        a /= 2.0;
        norm /= 2.0;
        ++squarings;
    }
    CMatrix term = CMatrix::Identity(m.rows(), m.cols());
    CMatrix sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < squarings; ++k) {
        sum = sum * sum;
    }
    return sum;
}

/// Composite Simpson rule on n (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    if (n % 2) {
        ++n;
    }
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) {
        s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// Fixed point of Q = tanh(k Q) by iteration from Q = 1.
inline double fixed_point_qs(double k) {
    double q = 1.0;
    for (int it = 0; it < 200000; ++it) {
        double next = std::tanh(k * q);
        if (std::abs(next - q) < 1e-16) {
            return next;
        }
        q = next;
    }
    return q;
}

}  // namespace oracle

#endif
