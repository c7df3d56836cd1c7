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

#include "nml/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "nml/numerics.hpp"
#include "nml/qsim.hpp"

namespace nml::meanfield {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

void check_lattice(int d, double J) {
    if (d < 1) {
        throw ContractError("dimension d must be at least 1");
    }
    if (!(J > 0) || !std::isfinite(J)) {
        throw ContractError("J must be finite and positive");
    }
}

void check_rate(double h) {
    if (!(h >= 0) || !std::isfinite(h)) {
        throw ContractError("h must be finite and nonnegative");
    }
}

void check_time(double t_f) {
    if (!(t_f > 0) || !std::isfinite(t_f)) {
        throw ContractError("t_f must be finite and positive");
    }
}

void check_lag(double t_f, double dt) {
    if (!(dt >= 0) || !(dt <= t_f)) {
        std::ostringstream msg;
        msg << "time lag " << dt << " outside [0, " << t_f << "]";
        throw ContractError(msg.str());
    }
}

// Twice the integral of f over [0, t_f / 2] for f nonincreasing there, split
// into geometric segments that grow away from the origin where the coupling
// varies on `scale`. Stops once the remaining tail is below round-off.
double integrate_reflected(const std::function<double(double)> &f, double t_f, double scale, double tol) {
    const double half = 0.5 * t_f;
    std::vector<double> edges{half};
    const double floor = std::min(half, scale) / 16.0;
    while (edges.back() > floor) {
        edges.push_back(0.5 * edges.back());
    }
    edges.push_back(0.0);
    double total = 0.0;
    for (size_t k = edges.size() - 1; k > 0; --k) {
        double lo = edges[k], hi = edges[k - 1];
        if (total > 0 && f(lo) * (half - lo) <= 1e-17 * total) {
            break;
        }
        total += numerics::integrate(f, lo, hi, tol).value;
    }
    return 2.0 * total;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// sinh(A) / (cosh(A) + cosh(B)) for A >= 0, without overflow.
double saddle_ratio(double A, double B) {
    B = std::abs(B);
    double e2a = std::exp(-2.0 * A);
    double denom = 1.0 + e2a + std::exp(B - A) + std::exp(-B - A);
    return (1.0 - e2a) / denom;
}

}  // namespace

void MeanFieldParams::validate() const {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    if (R < 1) {
        throw ContractError("replica count R must be at least 1");
    }
}

double solve_qs(int d, double J, double t_f) {
    check_lattice(d, J);
    check_time(t_f);
    const double k = 4.0 * d * J * t_f;
    if (k <= 1.0) {
        return 0.0;
    }
    // tanh(kQ) - Q is positive on (0, Q*) and negative on (Q*, 1].
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (std::tanh(k * mid) - mid > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double swssb_critical_time(int d, double J) {
    check_lattice(d, J);
    return 1.0 / (4.0 * d * J);
}

double swssb_xi(int d, double J, double t_f) {
    check_lattice(d, J);
    check_time(t_f);
    double num = 8.0 * d * J * t_f - 1.0;
    double den = 2.0 * d - 8.0 * d * d * J * t_f;
    if (num < 0 || den <= 0) {
        throw DomainError("swssb_xi requires 1/(8dJ) <= t_f < 1/(4dJ)");
    }
    return std::sqrt(num / den);
}

double dz_propagator(double h, double t_f, double dt) {
    check_rate(h);
    check_time(t_f);
    check_lag(t_f, dt);
    if (h == 0) {
        return 1.0;
    }
    // cosh^2(x) / cosh^2(y) with x - y formed exactly on the near half.
    const double s = std::min(dt, t_f - dt);
    const double log_ratio =
        -4.0 * h * s + std::log1p(std::exp(-4.0 * h * (t_f - 2.0 * s))) - std::log1p(std::exp(-4.0 * h * t_f));
    return std::exp(2.0 * log_ratio);
}

double dz_stationary(double h, double dt) {
    if (!(h > 0) || !std::isfinite(h)) {
        throw ContractError("dz_stationary requires h > 0");
    }
    if (!(dt >= 0)) {
        throw ContractError("time lag must be nonnegative");
    }
    return std::exp(-8.0 * h * dt);
}

double dz_integral(double h, double t_f) {
    check_rate(h);
    check_time(t_f);
    if (h == 0) {
        return t_f;
    }
    return integrate_reflected([&](double dt) { return dz_propagator(h, t_f, dt); }, t_f, 1.0 / (8.0 * h), 1e-11);
}

double dz_integral_closed(double h, double t_f) {
    check_rate(h);
    check_time(t_f);
    if (h == 0) {
        return t_f;
    }
    double x = 2.0 * h * t_f;
    double sech = 1.0 / std::cosh(x);
    return 0.5 * t_f * sech * sech + std::tanh(x) / (4.0 * h);
}

double partial_quadratic_coeff(int d, double J, double h, double t_f) {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    const double q = solve_qs(d, J, t_f);
    const double weight = (1.0 + q) * (1.0 + q);
    return 2.0 * d * J * t_f - 8.0 * d * d * J * J * t_f * weight * dz_integral(h, t_f);
}

double partial_stationary_hc(int d, double J) {
    check_lattice(d, J);
    return 4.0 * d * J;
}

double stationary_tau_c(int d, double J) {
    check_lattice(d, J);
    return 1.0 / (32.0 * d * J);
}

CorrelationLengths stationary_xi_r(int d, double J, double tau) {
    check_lattice(d, J);
    const double djt = d * J * tau;
    if (!(tau > 0) || !(32.0 * djt < 1.0) || 64.0 * djt < 1.0) {
        throw DomainError("stationary_xi_r requires 1/(64dJ) <= tau < 1/(32dJ)");
    }
    CorrelationLengths out;
    out.spatial = std::sqrt((64.0 * djt - 1.0) / (2.0 * d - 64.0 * d * djt));
    out.temporal = std::sqrt(32.0 * djt * tau * tau / (1.0 - 32.0 * djt));
    return out;
}

BranchModel::BranchModel(double gamma, double field, double h) : gamma_(gamma), field_(field), h_(h) {
    check_rate(h);
    if (!std::isfinite(gamma) || !std::isfinite(field)) {
        throw ContractError("branch model parameters must be finite");
    }
}

double BranchModel::omega() const {
    return std::sqrt(0.25 * gamma_ * gamma_ + 2.0 * h_ * field_ * field_);
}

Eigen::Matrix4d BranchModel::generator() const {
    // Basis index (b_plus << 1) | b_minus.
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    const double coupling = std::sqrt(2.0 * h_) * field_;
    for (int b = 0; b < 4; ++b) {
        int zp = (b & 2) ? -1 : 1;
        int zm = (b & 1) ? -1 : 1;
        m(b, b) = gamma_ * zp * zm;
        m(b ^ 2, b) += coupling;
        m(b ^ 1, b) += coupling;
    }
    return m;
}

double BranchModel::trace_closed(double t) const {
    return 2.0 * std::cosh(2.0 * t * omega()) + 2.0 * std::cosh(t * gamma_);
}

double BranchModel::log_trace_closed(double t) const {
    return numerics::log_add_exp(numerics::log_cosh(2.0 * t * omega()), numerics::log_cosh(t * gamma_)) + kLog2;
}

double BranchModel::trace_matrix(double t) const {
    qsim::Matrix m = generator().cast<qsim::Complex>();
    return qsim::hermitian_exp(m, t).trace().real();
}

double l0_trace(const BranchModel &branch, double t_f) {
    check_time(t_f);
    double closed = branch.trace_closed(t_f);
    double log_closed = branch.log_trace_closed(t_f);
    double log_matrix;
    double matrix = branch.trace_matrix(t_f);
    if (std::isfinite(matrix) && matrix > 0) {
        log_matrix = std::log(matrix);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(branch.generator());
        Eigen::Vector4d logs = eig.eigenvalues() * t_f;
        log_matrix = numerics::log_sum_exp(std::span<const double>(logs.data(), 4));
    }
    if (std::abs(log_matrix - log_closed) > 1e-8) {
        std::ostringstream msg;
        msg << "l0_trace: closed form and matrix exponential disagree (log " << log_closed << " vs " << log_matrix
            << ")";
        throw NumericalError(msg.str());
    }
    return closed;
}

double saddle_free_energy(int d, double J, double h, double t_f, double qs, double field) {
    BranchModel branch(4.0 * d * J * qs, field, h);
    return 0.5 * field * field - branch.log_trace_closed(t_f) / t_f;
}

double saddle_xi(int d, double J, double h, double t_f, double qs) {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    if (!(qs >= 0) || !(qs <= 1)) {
        throw ContractError("Q must lie in [0, 1]");
    }
    if (h == 0) {
        return 0.0;
    }
    const double gamma = 4.0 * d * J * qs;
    const double upper = std::sqrt(8.0 * h) + 1.0;
    auto stationarity = [&](double xi) {
        double omega = std::sqrt(0.25 * gamma * gamma + 2.0 * h * xi * xi);
        return omega - 4.0 * h * saddle_ratio(2.0 * t_f * omega, t_f * gamma);
    };
    auto energy = [&](double xi) { return saddle_free_energy(d, J, h, t_f, qs, xi); };

    constexpr int kScan = 1000;
    std::vector<double> candidates{0.0};
    double prev_x = 0.0;
    double prev_g = stationarity(0.0);
    for (int k = 1; k <= kScan; ++k) {
        double x = upper * k / kScan;
        double g = stationarity(x);
        if (g == 0) {
            candidates.push_back(x);
        } else if (prev_g != 0 && (g < 0) != (prev_g < 0)) {
            candidates.push_back(numerics::bisect_root(stationarity, prev_x, x, 1e-14 * upper));
        }
        prev_x = x;
        prev_g = g;
    }
    double best = 0.0;
    double best_energy = energy(0.0);
    for (double c : candidates) {
        double e = energy(c);
        if (e < best_energy) {
            best = c;
            best_energy = e;
        }
    }
    constexpr int kCheck = 200;
    for (int k = 0; k < kCheck; ++k) {
        double x = upper * k / (kCheck - 1);
        double e = energy(x);
        if (e < best_energy - 1e-12 * (1.0 + std::abs(best_energy))) {
            std::ostringstream msg;
            msg << "saddle_xi: grid point xi=" << x << " has f0=" << e << " below the selected saddle xi=" << best
                << " (f0=" << best_energy << "); d=" << d << " J=" << J << " h=" << h << " t_f=" << t_f << " Q=" << qs;
            throw NumericalError(msg.str());
        }
    }
    return best;
}

KeldyshPropagator::KeldyshPropagator(const BranchModel &branch, double t_f) : t_f_(t_f) {
    check_time(t_f);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(branch.generator());
    if (eig.info() != Eigen::Success) {
        throw NumericalError("KeldyshPropagator: eigendecomposition failed");
    }
    eigenvalues_ = eig.eigenvalues();
    const Eigen::Matrix4d &v = eig.eigenvectors();
    Eigen::Matrix4d zp = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
    Eigen::Matrix4d zm = Eigen::Vector4d(1, -1, 1, -1).asDiagonal();
    z_plus_ = v.transpose() * zp * v;
    z_minus_ = v.transpose() * zm * v;
}

KeldyshPropagator KeldyshPropagator::at_saddle(int d, double J, double h, double t_f) {
    double q = solve_qs(d, J, t_f);
    double xi = h == 0 ? 0.0 : saddle_xi(d, J, h, t_f, q);
    return KeldyshPropagator(BranchModel(4.0 * d * J * q, xi, h), t_f);
}

double KeldyshPropagator::operator()(double dt) const {
    check_lag(t_f_, dt);
    const double top = eigenvalues_.maxCoeff();
    Eigen::Vector4d early;
    Eigen::Vector4d late;
    double k0 = 0.0;
    for (int m = 0; m < 4; ++m) {
        early(m) = std::exp(dt * (eigenvalues_(m) - top));
        late(m) = std::exp((t_f_ - dt) * (eigenvalues_(m) - top));
        k0 += std::exp(t_f_ * (eigenvalues_(m) - top));
    }
    if (k0 < 1e-300) {
        throw NumericalError("KeldyshPropagator: normalization underflow");
    }
    double same = 0.0;
    double cross = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            double w = early(mu) * late(nu);
            same += w * z_plus_(nu, mu) * z_plus_(mu, nu);
            cross += w * z_plus_(nu, mu) * z_minus_(mu, nu);
        }
    }
    double ratio = (same + std::abs(cross)) / k0;
    return ratio * ratio;
}

double dk_propagator(int d, double J, double h, double t_f, double dt) {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    check_lag(t_f, dt);
    double q = solve_qs(d, J, t_f);
    double xi = h == 0 ? 0.0 : saddle_xi(d, J, h, t_f, q);
    double gamma = 4.0 * d * J * q;
    double plus = KeldyshPropagator(BranchModel(gamma, xi, h), t_f)(dt);
    double minus = KeldyshPropagator(BranchModel(gamma, -xi, h), t_f)(dt);
    if (std::abs(plus - minus) > 1e-9 * std::max(1.0, std::abs(plus))) {
        std::ostringstream msg;
        msg << "dk_propagator: field sign asymmetry " << plus << " vs " << minus;
        throw NumericalError(msg.str());
    }
    return 0.5 * (plus + minus);
}

double complete_quadratic_coeff(int d, double J, double h, double t_f) {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    KeldyshPropagator coupling = KeldyshPropagator::at_saddle(d, J, h, t_f);
    double scale = 1.0 / (16.0 * h + 8.0 * d * J);
    double integral = integrate_reflected([&](double dt) { return coupling(dt); }, t_f, scale, 1e-10);
    return 2.0 * d * J * t_f - 8.0 * d * d * J * J * t_f * integral;
}

double complete_stationary_hc(int d, double J) {
    check_lattice(d, J);
    auto mass = [](double x) {
        double s = 1.0 + 0.5 / x;
        return 2.0 * x - 1.0 - s * s;
    };
    return numerics::bisect_root(mass, 1.0, 3.0, 1e-13) * d * J;
}

StationaryCoefficients stationary_coefficients(int d, double J, double h) {
    check_lattice(d, J);
    check_rate(h);
    const double dj = d * J;
    StationaryCoefficients out;
    out.a = dj * J * (2 * h + dj) / (h * h * (2 * h - dj)) - 2 * J;
    out.c = 8 * (2 * h - dj) * std::sqrt(1.0 / d - 2 * h * h * (2 * h - dj) / (d * dj * (2 * h + dj)));
    out.m = d * std::sqrt((2 * h + dj) * (4 * dj * h * h * (2 * h - dj) - dj * dj * (2 * h + dj))) /
            (8 * (2 * h - dj) * (-2 * h * h * (2 * h - dj) + dj * (2 * h + dj)));
    return out;
}

double dr_propagator(int R, double h, double t_f, double dt) {
    if (R < 1) {
        throw ContractError("replica count R must be at least 1");
    }
    check_rate(h);
    check_time(t_f);
    check_lag(t_f, dt);
    if (R == 1) {
        return 1.0;
    }
    const double ht = h * t_f;
    std::vector<double> denominator;
    for (int a = 0; a <= 2 * R; ++a) {
        double k = 2.0 * a - 2.0 * R;
        denominator.push_back(log_binomial(2 * R, a) + ht * k * k);
    }
    std::vector<double> numerator;
    numerator.push_back(kLog2 + log_binomial(2 * R - 2, R - 1) + numerics::log_add_exp(0.0, 4.0 * ht));
    const double log4 = 2.0 * kLog2;
    const double drift = 8.0 * h * (t_f - 2.0 * dt);
    for (int a = 0; a <= R - 2; ++a) {
        double k = a + 1.0 - R;
        double base = log4 + log_binomial(2 * R - 2, a) + 4.0 * ht * k * k;
        numerator.push_back(base);
        numerator.push_back(base + 4.0 * ht + numerics::log_cosh(drift * k));
    }
    return std::exp(numerics::log_sum_exp(numerator) - numerics::log_sum_exp(denominator));
}

double r_replica_hc(int R, int d, double J) {
    check_lattice(d, J);
    if (R < 1) {
        throw ContractError("replica count R must be at least 1");
    }
    if (R == 1) {
        throw DomainError("r_replica_hc is undefined at R = 1; use complete_stationary_hc");
    }
    return d * J / (2.0 * (R - 1));
}

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::Trivial:
            return "Trivial";
        case Phase::SWSSB:
            return "SWSSB";
        case Phase::LRE:
            return "LRE";
    }
    return "?";
}

PhasePoint classify_point(Readout mode, int d, double J, double h, double t_f) {
    check_lattice(d, J);
    check_rate(h);
    check_time(t_f);
    PhasePoint p;
    p.h = h;
    p.t_f = t_f;
    switch (mode) {
        case Readout::None:
            p.q_s = solve_qs(d, J, t_f);
            p.r_coeff = 2.0 * d * J * t_f;
            break;
        case Readout::Partial:
            p.q_s = solve_qs(d, J, t_f);
            p.r_coeff = partial_quadratic_coeff(d, J, h, t_f);
            break;
        case Readout::Complete:
            p.q_s = 0.0;
            p.r_coeff = complete_quadratic_coeff(d, J, h, t_f);
            break;
    }
    if (p.r_coeff < 0) {
        p.label = Phase::LRE;
    } else {
        p.label = p.q_s > 0 ? Phase::SWSSB : Phase::Trivial;
    }
    return p;
}

}  // namespace nml::meanfield
