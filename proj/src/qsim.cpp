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

#include "nml/qsim.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nml::qsim {

namespace {

constexpr double kStateTolerance = 1e-10;

void check_register(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ContractError("register size " + std::to_string(n_qubits) + " outside [1, " + std::to_string(kMaxQubits) +
                            "]");
    }
}

void check_site(int site, int n_qubits) {
    if (site < 0 || site >= n_qubits) {
        throw ContractError("site " + std::to_string(site) + " outside register of " + std::to_string(n_qubits));
    }
}

int register_size_for(Eigen::Index dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw ContractError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    int n = std::countr_zero(static_cast<uint64_t>(dim));
    check_register(n);
    return n;
}

void check_same_register(const QuantumState &state, const PauliOperator &op) {
    if (state.n_qubits() != op.n_qubits()) {
        throw ContractError("operator on " + std::to_string(op.n_qubits()) + " qubits applied to a register of " +
                            std::to_string(state.n_qubits()));
    }
}

void check_involutory(const PauliOperator &op) {
    if (!op.is_involutory()) {
        throw ContractError("operator " + op.str() + " does not square to identity");
    }
}

std::vector<Complex> phase_table(const PauliOperator &op) {
    const int dim = 1 << op.n_qubits();
    std::vector<Complex> ph(dim);
    for (int b = 0; b < dim; ++b) {
        ph[b] = op.phase(b);
    }
    return ph;
}

// rho <- M rho M^dagger for M = a I + c P with real a, c and Hermitian P.
void conjugate_kraus(Matrix &rho, const PauliOperator &op, double a, double c) {
    const int dim = static_cast<int>(rho.rows());
    const uint32_t x = op.x_mask();
    const std::vector<Complex> ph = phase_table(op);
    if (x == 0) {
        Eigen::VectorXd diag(dim);
        for (int b = 0; b < dim; ++b) {
            diag[b] = a + c * ph[b].real();
        }
        for (int col = 0; col < dim; ++col) {
            for (int r = 0; r < dim; ++r) {
                rho(r, col) *= diag[r] * diag[col];
            }
        }
        return;
    }
    // (P rho)(r, k) = ph[r^x] rho(r^x, k) and (rho P)(k, col) = rho(k, col^x) ph[col].
    Matrix out(dim, dim);
    const double aa = a * a, ac = a * c, cc = c * c;
    for (int col = 0; col < dim; ++col) {
        const int cx = col ^ x;
        const Complex pc = ph[col];
        for (int r = 0; r < dim; ++r) {
            const int rx = r ^ x;
            Complex v = aa * rho(r, col);
            if (ac != 0) {
                v += ac * (ph[rx] * rho(rx, col) + rho(r, cx) * pc);
            }
            if (cc != 0) {
                v += cc * ph[rx] * rho(rx, cx) * pc;
            }
            out(r, col) = v;
        }
    }
    rho.swap(out);
}

// rho <- (1 - p) rho + p P rho P for a phase-free X string P.
void mix_with_flip(Matrix &rho, uint32_t x, double p) {
    const int dim = static_cast<int>(rho.rows());
    for (int col = 0; col < dim; ++col) {
        const int cx = col ^ x;
        for (int r = 0; r < dim; ++r) {
            const int rx = r ^ x;
            if (cx < col || (cx == col && rx < r)) {
                continue;
            }
            Complex u = rho(r, col);
            Complex v = rho(rx, cx);
            rho(r, col) = (1 - p) * u + p * v;
            rho(rx, cx) = (1 - p) * v + p * u;
        }
    }
}

Vector apply_pauli_vector(const Vector &psi, const PauliOperator &op) {
    const int dim = static_cast<int>(psi.size());
    Vector out(dim);
    for (int b = 0; b < dim; ++b) {
        out[b ^ op.x_mask()] = op.phase(b) * psi[b];
    }
    return out;
}

template <typename M>
void check_hermitian(const M &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw ContractError(std::string(what) + ": matrix is not square");
    }
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kStateTolerance * scale) {
        throw ContractError(std::string(what) + ": matrix is not Hermitian (deviation " + std::to_string(dev) + ")");
    }
}

template <typename M>
M psd_sqrt_impl(const M &m) {
    check_hermitian(m, "psd_sqrt");
    Eigen::SelfAdjointEigenSolver<M> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("psd_sqrt: eigendecomposition failed");
    }
    Eigen::VectorXd ev = solver.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -1e-8) {
        throw NumericalError("psd_sqrt: matrix has eigenvalue " + std::to_string(ev.minCoeff()));
    }
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

namespace detail {
struct StateBuilder {
    static QuantumState pure(int n, Vector psi) {
        return QuantumState(n, std::move(psi));
    }
    static QuantumState mixed(int n, Matrix rho) {
        return QuantumState(n, std::move(rho));
    }
    static Matrix &density(QuantumState &state) {
        return std::get<Matrix>(state.data_);
    }
};
}  // namespace detail

using detail::StateBuilder;

PauliOperator::PauliOperator(Kind kind, int n_qubits, std::vector<int> sites, uint32_t x_mask, uint32_t z_mask,
                             int phase_exponent)
    : kind_(kind),
      n_qubits_(n_qubits),
      sites_(std::move(sites)),
      x_mask_(x_mask),
      z_mask_(z_mask),
      phase_exponent_(((phase_exponent % 4) + 4) % 4) {
}

PauliOperator PauliOperator::zz_bond(int i, int j, int n_qubits, Boundary boundary) {
    check_register(n_qubits);
    check_site(i, n_qubits);
    check_site(j, n_qubits);
    int lo = std::min(i, j);
    int hi = std::max(i, j);
    bool adjacent = hi - lo == 1 || (boundary == Boundary::Periodic && n_qubits > 2 && lo == 0 && hi == n_qubits - 1);
    if (!adjacent) {
        throw ContractError("sites " + std::to_string(i) + " and " + std::to_string(j) + " do not form a bond");
    }
    return PauliOperator(Kind::ZZBond, n_qubits, {i, j}, 0, (1u << i) | (1u << j), 0);
}

PauliOperator PauliOperator::x_site(int i, int n_qubits) {
    check_register(n_qubits);
    check_site(i, n_qubits);
    return PauliOperator(Kind::XSite, n_qubits, {i}, 1u << i, 0, 0);
}

PauliOperator PauliOperator::zz(int i, int j, int n_qubits) {
    check_register(n_qubits);
    check_site(i, n_qubits);
    check_site(j, n_qubits);
    if (i == j) {
        throw ContractError("zz: sites must differ");
    }
    return PauliOperator(Kind::General, n_qubits, {std::min(i, j), std::max(i, j)}, 0, (1u << i) | (1u << j), 0);
}

PauliOperator PauliOperator::parse(std::string_view text) {
    int phase = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        if (text.front() == '-') {
            phase += 2;
        }
        text.remove_prefix(1);
    }
    if (!text.empty() && text.front() == 'i') {
        phase += 1;
        text.remove_prefix(1);
    }
    int n = static_cast<int>(text.size());
    check_register(n);
    uint32_t x = 0;
    uint32_t z = 0;
    std::vector<int> sites;
    for (int k = 0; k < n; ++k) {
        switch (text[k]) {
            case 'I':
            case '_':
                continue;
            case 'X':
                x |= 1u << k;
                break;
            case 'Z':
                z |= 1u << k;
                break;
            case 'Y':
                x |= 1u << k;
                z |= 1u << k;
                phase += 1;
                break;
            default:
                throw ContractError(std::string("unknown Pauli character '") + text[k] + "'");
        }
        sites.push_back(k);
    }
    return PauliOperator(Kind::General, n, std::move(sites), x, z, phase);
}

bool PauliOperator::is_involutory() const {
    return (2 * phase_exponent_ + 2 * std::popcount(x_mask_ & z_mask_)) % 4 == 0;
}

Complex PauliOperator::phase(uint32_t basis) const {
    static const Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    int k = phase_exponent_ + 2 * (std::popcount(basis & z_mask_) & 1);
    return kPowers[k & 3];
}

Matrix PauliOperator::matrix() const {
    int dim = 1 << n_qubits_;
    Matrix m = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        m(b ^ x_mask_, b) = phase(b);
    }
    return m;
}

std::string PauliOperator::str() const {
    std::string out;
    int k = phase_exponent_;
    for (int q = 0; q < n_qubits_; ++q) {
        bool xb = (x_mask_ >> q) & 1;
        bool zb = (z_mask_ >> q) & 1;
        if (xb && zb) {
            k -= 1;
        }
    }
    k = ((k % 4) + 4) % 4;
    static const char *kPrefix[4] = {"+", "+i", "-", "-i"};
    out += kPrefix[k];
    for (int q = 0; q < n_qubits_; ++q) {
        bool xb = (x_mask_ >> q) & 1;
        bool zb = (z_mask_ >> q) & 1;
        out += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return out;
}

QuantumState QuantumState::plus_state(int n_qubits) {
    check_register(n_qubits);
    int dim = 1 << n_qubits;
    Vector psi = Vector::Constant(dim, Complex(std::pow(2.0, -0.5 * n_qubits), 0));
    return QuantumState(n_qubits, std::move(psi));
}

QuantumState QuantumState::from_amplitudes(Vector amplitudes) {
    int n = register_size_for(amplitudes.size());
    double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1) > kStateTolerance) {
        throw ContractError("amplitudes have squared norm " + std::to_string(norm2));
    }
    return QuantumState(n, std::move(amplitudes));
}

QuantumState QuantumState::from_density(Matrix density) {
    if (density.rows() != density.cols()) {
        throw ContractError("density matrix is not square");
    }
    int n = register_size_for(density.rows());
    check_hermitian(density, "from_density");
    double tr = density.trace().real();
    if (std::abs(tr - 1) > kStateTolerance) {
        throw ContractError("density matrix has trace " + std::to_string(tr));
    }
    return QuantumState(n, std::move(density));
}

const Vector &QuantumState::amplitudes() const {
    if (!is_pure()) {
        throw ContractError("state is held as a density matrix");
    }
    return std::get<Vector>(data_);
}

const Matrix &QuantumState::density() const {
    if (is_pure()) {
        throw ContractError("state is held as amplitudes; promote it first");
    }
    return std::get<Matrix>(data_);
}

Matrix QuantumState::density_matrix() const {
    if (is_pure()) {
        const Vector &psi = std::get<Vector>(data_);
        return psi * psi.adjoint();
    }
    return std::get<Matrix>(data_);
}

QuantumState QuantumState::promoted() const {
    return QuantumState(n_qubits_, density_matrix());
}

double QuantumState::trace() const {
    if (is_pure()) {
        return std::get<Vector>(data_).squaredNorm();
    }
    return std::get<Matrix>(data_).trace().real();
}

double QuantumState::purity() const {
    if (is_pure()) {
        double n2 = std::get<Vector>(data_).squaredNorm();
        return n2 * n2;
    }
    return std::get<Matrix>(data_).squaredNorm();
}

KrausCoefficients kraus_coefficients(double beta) {
    if (!(beta >= 0)) {
        throw ContractError("measurement strength must be nonnegative");
    }
    double e1 = std::exp(-beta);
    double norm = 2 * std::sqrt(1 + e1 * e1);
    return {(1 + e1) / norm, -std::expm1(-beta) / norm};
}

Matrix WeakKraus::matrix() const {
    check_involutory(op);
    if (outcome != 1 && outcome != -1) {
        throw ContractError("outcome must be +1 or -1");
    }
    auto [a, b] = kraus_coefficients(beta);
    int dim = 1 << op.n_qubits();
    return a * Matrix::Identity(dim, dim) + (outcome * b) * op.matrix();
}

double expectation_pauli(const QuantumState &state, const PauliOperator &op) {
    check_same_register(state, op);
    check_involutory(op);
    const uint32_t x = op.x_mask();
    const int dim = state.dimension();
    Complex acc = 0;
    if (state.is_pure()) {
        const Vector &psi = state.amplitudes();
        for (int b = 0; b < dim; ++b) {
            acc += std::conj(psi[b ^ x]) * op.phase(b) * psi[b];
        }
    } else {
        const Matrix &rho = state.density();
        for (int b = 0; b < dim; ++b) {
            acc += op.phase(b) * rho(b, b ^ x);
        }
    }
    return acc.real();
}

QuantumState apply_pauli(const QuantumState &state, const PauliOperator &op) {
    check_same_register(state, op);
    check_involutory(op);
    if (state.is_pure()) {
        return StateBuilder::pure(state.n_qubits(), apply_pauli_vector(state.amplitudes(), op));
    }
    Matrix out = state.density();
    conjugate_kraus(out, op, 0.0, 1.0);
    return StateBuilder::mixed(state.n_qubits(), std::move(out));
}

double outcome_probability(const QuantumState &state, const PauliOperator &op, double beta, int outcome) {
    if (outcome != 1 && outcome != -1) {
        throw ContractError("outcome must be +1 or -1");
    }
    if (!(beta >= 0)) {
        throw ContractError("measurement strength must be nonnegative");
    }
    double p = 0.5 * (1 + outcome * std::tanh(beta) * expectation_pauli(state, op));
    return std::clamp(p, 0.0, 1.0);
}

MeasurementResult apply_weak_outcome(QuantumState state, const PauliOperator &op, double beta, int outcome) {
    double p = outcome_probability(state, op, beta, outcome);
    if (p <= 0) {
        throw NumericalError("outcome " + std::to_string(outcome) + " of " + op.str() + " has zero probability");
    }
    auto [a, b] = kraus_coefficients(beta);
    double c = outcome * b;
    if (state.is_pure()) {
        const Vector &psi = state.amplitudes();
        Vector out = a * psi + c * apply_pauli_vector(psi, op);
        out /= out.norm();
        return {outcome, StateBuilder::pure(state.n_qubits(), std::move(out)), p};
    }
    Matrix &rho = StateBuilder::density(state);
    conjugate_kraus(rho, op, a, c);
    rho /= rho.trace().real();
    return {outcome, std::move(state), p};
}

MeasurementResult sample_weak_measurement(QuantumState state, const PauliOperator &op, double beta, Rng &rng) {
    double p_plus = outcome_probability(state, op, beta, 1);
    int outcome = rng.uniform() < p_plus ? 1 : -1;
    return apply_weak_outcome(std::move(state), op, beta, outcome);
}

QuantumState apply_dephasing_channel(QuantumState state, const PauliOperator &op, double beta) {
    check_same_register(state, op);
    check_involutory(op);
    if (state.is_pure()) {
        throw ContractError("dephasing channel requires a density matrix; promote the state first");
    }
    if (!(beta >= 0)) {
        throw ContractError("measurement strength must be nonnegative");
    }
    auto [a, b] = kraus_coefficients(beta);
    double flip = 2 * b * b;
    Matrix &rho = StateBuilder::density(state);
    if (op.z_mask() == 0 && op.phase(0) == Complex(1, 0)) {
        mix_with_flip(rho, op.x_mask(), flip);
        return state;
    }
    Matrix flipped = rho;
    conjugate_kraus(flipped, op, 0.0, 1.0);
    rho = (1 - flip) * rho + flip * flipped;
    return state;
}

Matrix psd_sqrt(const Matrix &m) {
    return psd_sqrt_impl(m);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd &m) {
    return psd_sqrt_impl(m);
}

double uhlmann_fidelity(const QuantumState &rho, const QuantumState &sigma) {
    if (rho.n_qubits() != sigma.n_qubits()) {
        throw ContractError("fidelity between registers of different size");
    }
    for (const QuantumState *s : {&rho, &sigma}) {
        if (std::abs(s->trace() - 1) > 1e-6) {
            throw ContractError("fidelity: state has trace " + std::to_string(s->trace()));
        }
    }
    if (rho.is_pure() || sigma.is_pure()) {
        const QuantumState &pure = rho.is_pure() ? rho : sigma;
        const QuantumState &other = rho.is_pure() ? sigma : rho;
        const Vector &psi = pure.amplitudes();
        if (other.is_pure()) {
            return std::norm(psi.dot(other.amplitudes()));
        }
        return std::max(0.0, psi.dot(other.density() * psi).real());
    }
    Matrix root = psd_sqrt(rho.density());
    Matrix inner = root * sigma.density() * root;
    inner = 0.5 * (inner + inner.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(inner, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("uhlmann_fidelity: eigendecomposition failed");
    }
    double tr = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

Matrix hermitian_exp(const Matrix &m, double t) {
    check_hermitian(m, "hermitian_exp");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_exp: eigendecomposition failed");
    }
    Eigen::VectorXd ex = (t * solver.eigenvalues().array()).exp();
    return solver.eigenvectors() * ex.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace nml::qsim
