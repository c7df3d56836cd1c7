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

#ifndef NML_QSIM_HPP
#define NML_QSIM_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nml/numerics.hpp"
#include "nml/rng.hpp"

namespace nml::qsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

constexpr int kMaxQubits = 14;

enum class Boundary { Open, Periodic };

/// Pauli string on an n-qubit register. Qubit k is bit k of a basis index.
/// Stored as x/z bit masks plus a global phase i^phase_exponent, with
/// Y = i X Z.
class PauliOperator {
   public:
    enum class Kind { ZZBond, XSite, General };

    /// Z_i Z_j on a bond of a chain; i and j must be neighbours under `boundary`.
    static PauliOperator zz_bond(int i, int j, int n_qubits, Boundary boundary);
    /// X_i.
    static PauliOperator x_site(int i, int n_qubits);
    /// Z_i Z_j for any distinct pair, no adjacency requirement.
    static PauliOperator zz(int i, int j, int n_qubits);
    /// Parses e.g. "XIZ", "-ZZ" or "iXY". Character k acts on qubit k.
    static PauliOperator parse(std::string_view text);

    Kind kind() const {
        return kind_;
    }
    int n_qubits() const {
        return n_qubits_;
    }
    const std::vector<int> &sites() const {
        return sites_;
    }
    uint32_t x_mask() const {
        return x_mask_;
    }
    uint32_t z_mask() const {
        return z_mask_;
    }
    /// Square is +I. Holds iff the operator is Hermitian.
    bool is_involutory() const;
    /// Coefficient of basis state |b ^ x_mask> in P|b>.
    Complex phase(uint32_t basis) const;
    /// Dense 2^n x 2^n matrix.
    Matrix matrix() const;
    std::string str() const;

   private:
    PauliOperator(Kind kind, int n_qubits, std::vector<int> sites, uint32_t x_mask, uint32_t z_mask,
                  int phase_exponent);

    Kind kind_;
    int n_qubits_;
    std::vector<int> sites_;
    uint32_t x_mask_;
    uint32_t z_mask_;
    int phase_exponent_;  // total phase i^k including the Y factors
};

namespace detail {
struct StateBuilder;
}

/// Dense state on n qubits, either a normalized amplitude vector or a unit
/// trace density matrix.
class QuantumState {
   public:
    static QuantumState plus_state(int n_qubits);
    static QuantumState from_amplitudes(Vector amplitudes);
    static QuantumState from_density(Matrix density);

    int n_qubits() const {
        return n_qubits_;
    }
    int dimension() const {
        return 1 << n_qubits_;
    }
    bool is_pure() const {
        return std::holds_alternative<Vector>(data_);
    }
    const Vector &amplitudes() const;
    const Matrix &density() const;
    /// Density-matrix form of either representation.
    Matrix density_matrix() const;
    /// Same state in the density-matrix representation.
    QuantumState promoted() const;
    double trace() const;
    double purity() const;

   private:
    friend struct detail::StateBuilder;
    QuantumState(int n_qubits, std::variant<Vector, Matrix> data) : n_qubits_(n_qubits), data_(std::move(data)) {
    }

    int n_qubits_;
    std::variant<Vector, Matrix> data_;
};

/// M(s) = a I + s b O, equal to exp(beta s O / 2) / sqrt(2 cosh beta) for
/// an involutory O. Accurate for any beta >= 0.
struct KrausCoefficients {
    double identity;
    double op;
};
KrausCoefficients kraus_coefficients(double beta);

struct WeakKraus {
    PauliOperator op;
    double beta;
    int outcome;

    Matrix matrix() const;
};

struct MeasurementResult {
    int outcome;
    QuantumState state;
    double probability;
};

double expectation_pauli(const QuantumState &state, const PauliOperator &op);

/// P psi, or P rho P for a density matrix.
QuantumState apply_pauli(const QuantumState &state, const PauliOperator &op);

/// Born probability of outcome s for a weak measurement of op.
double outcome_probability(const QuantumState &state, const PauliOperator &op, double beta, int outcome);

/// Applies M(outcome) and renormalizes. Throws NumericalError for an outcome
/// of zero probability.
MeasurementResult apply_weak_outcome(QuantumState state, const PauliOperator &op, double beta, int outcome);

/// Draws the outcome from the Born rule and applies it.
MeasurementResult sample_weak_measurement(QuantumState state, const PauliOperator &op, double beta, Rng &rng);

/// sum_s M(s) rho M(s)^dagger. Requires the density-matrix representation.
QuantumState apply_dephasing_channel(QuantumState state, const PauliOperator &op, double beta);

/// tr(sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double uhlmann_fidelity(const QuantumState &rho, const QuantumState &sigma);

/// Square root of a positive semidefinite Hermitian matrix. Negative
/// round-off eigenvalues are clamped to zero; anything below -1e-8 throws
/// NumericalError.
Matrix psd_sqrt(const Matrix &m);
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd &m);

/// exp(t M) for Hermitian M.
Matrix hermitian_exp(const Matrix &m, double t);

}  // namespace nml::qsim

#endif
