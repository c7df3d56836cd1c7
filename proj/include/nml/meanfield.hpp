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

#ifndef NML_MEANFIELD_HPP
#define NML_MEANFIELD_HPP

#include <string>

#include <Eigen/Dense>

#include "nml/readout.hpp"

namespace nml::meanfield {

/// Hypercubic lattice in d dimensions (coordination 2d) with ZZ rate J, X
/// rate h, final time t_f and, for the replica formulas, R copies.
struct MeanFieldParams {
    int d = 6;
    double J = 1.0;
    double h = 0.0;
    double t_f = 1.0;
    int R = 1;

    void validate() const;
};

/// Positive root of Q = tanh(4 d J t_f Q), or 0 when 4 d J t_f <= 1.
double solve_qs(int d, double J, double t_f);

/// 1 / (4 d J).
double swssb_critical_time(int d, double J);

/// Correlation length on the disordered side, 1/(8dJ) <= t_f < t_c.
double swssb_xi(int d, double J, double t_f);

/// cosh^2(2h(t_f - 2 dt)) / cosh^2(2 h t_f), for 0 <= dt <= t_f.
double dz_propagator(double h, double t_f, double dt);

/// exp(-8 h dt), the t_f -> infinity limit of dz_propagator.
double dz_stationary(double h, double dt);

/// Integral of dz_propagator over [0, t_f] by adaptive quadrature.
double dz_integral(double h, double t_f);

/// Antiderivative form of dz_integral, kept as a cross-check.
double dz_integral_closed(double h, double t_f);

/// Landau quadratic coefficient of the inter-replica order parameter under
/// partial readout. Negative means long-range entangled.
double partial_quadratic_coeff(int d, double J, double h, double t_f);

/// 4 d J.
double partial_stationary_hc(int d, double J);

/// 1 / (32 d J).
double stationary_tau_c(int d, double J);

struct CorrelationLengths {
    double spatial = 0.0;
    double temporal = 0.0;
};

/// Spatial and temporal correlation lengths at propagator range tau < tau_c.
CorrelationLengths stationary_xi_r(int d, double J, double tau);

/// Single-site generator on the forward/backward doubled qubit,
///   L0 = gamma Z(x)Z + sqrt(2h) field (X(x)I + I(x)X),
/// gamma = 4 d J Q.
class BranchModel {
   public:
    BranchModel(double gamma, double field, double h);

    double gamma() const {
        return gamma_;
    }
    double field() const {
        return field_;
    }
    double h() const {
        return h_;
    }
    /// sqrt(gamma^2 / 4 + 2 h field^2).
    double omega() const;
    Eigen::Matrix4d generator() const;
    /// 2 cosh(2 t omega) + 2 cosh(t gamma).
    double trace_closed(double t) const;
    /// log of trace_closed, finite for any t.
    double log_trace_closed(double t) const;
    /// tr exp(t L0) from the dense 4x4 exponential.
    double trace_matrix(double t) const;

   private:
    double gamma_;
    double field_;
    double h_;
};

/// tr exp(t_f L0), evaluated both ways. Throws NumericalError when the two
/// differ by more than 1e-8 relative.
double l0_trace(const BranchModel &branch, double t_f);

/// Single-site free energy f0(field) at the given Q.
double saddle_free_energy(int d, double J, double h, double t_f, double qs, double field);

/// Nonnegative saddle field minimizing f0 over [0, sqrt(8h) + 1].
double saddle_xi(int d, double J, double h, double t_f, double qs);

/// Temporal coupling of complete readout at one saddle. Diagonalizes L0 once,
/// then evaluates any dt cheaply.
class KeldyshPropagator {
   public:
    KeldyshPropagator(const BranchModel &branch, double t_f);
    /// Builds the branch from solve_qs and saddle_xi.
    static KeldyshPropagator at_saddle(int d, double J, double h, double t_f);

    double operator()(double dt) const;
    double t_f() const {
        return t_f_;
    }

   private:
    double t_f_;
    Eigen::Vector4d eigenvalues_;
    Eigen::Matrix4d z_plus_;   // Z(x)I in the eigenbasis
    Eigen::Matrix4d z_minus_;  // I(x)Z in the eigenbasis
};

/// ((K++ + |K+-|) / K0)^2 at the saddle, checked for both signs of the field.
double dk_propagator(int d, double J, double h, double t_f, double dt);

/// Landau quadratic coefficient under complete readout.
double complete_quadratic_coeff(int d, double J, double h, double t_f);

/// Root of the long-wave mass condition 2x - 1 = (1 + 1/(2x))^2 times d J.
double complete_stationary_hc(int d, double J);

/// Printed stationary Landau coefficients, for inspection only.
struct StationaryCoefficients {
    double a = 0.0;
    double c = 0.0;
    double m = 0.0;
};
StationaryCoefficients stationary_coefficients(int d, double J, double h);

/// R-replica temporal coupling from the binomial sums. Equal to 1 for R = 1.
double dr_propagator(int R, double h, double t_f, double dt);

/// d J / (2 (R - 1)), R >= 2.
double r_replica_hc(int R, int d, double J);

enum class Phase { Trivial, SWSSB, LRE };
std::string to_string(Phase phase);

struct PhasePoint {
    double h = 0.0;
    double t_f = 0.0;
    double q_s = 0.0;
    double r_coeff = 0.0;
    Phase label = Phase::Trivial;
};

/// Labels one (h, t_f) point. Complete readout never reports SWSSB and
/// reports q_s = 0; no readout has r_coeff = 2 d J t_f.
PhasePoint classify_point(Readout mode, int d, double J, double h, double t_f);

}  // namespace nml::meanfield

#endif
