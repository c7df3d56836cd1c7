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

#include "nml/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>

namespace nml::correlators {

using qsim::Matrix;
using qsim::QuantumState;

namespace {

int checked_record(const protocols::EnsembleStatistics &stats, int round) {
    int k = stats.record_index(round);
    if (k < 0) {
        throw ContractError("round " + std::to_string(round) + " was not recorded");
    }
    return k;
}

int checked_pair(const protocols::EnsembleStatistics &stats, int i, int j) {
    int k = stats.pair_index(i, j);
    if (k < 0) {
        throw ContractError("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") is not tracked");
    }
    return k;
}

// Diagonal of Z_i Z_j in the computational basis.
Eigen::VectorXd zz_signs(int n_qubits, int i, int j) {
    int dim = 1 << n_qubits;
    Eigen::VectorXd d(dim);
    for (int b = 0; b < dim; ++b) {
        d[b] = (((b >> i) ^ (b >> j)) & 1) ? -1.0 : 1.0;
    }
    return d;
}

void check_pair(int n_qubits, int i, int j) {
    if (i < 0 || j < 0 || i >= n_qubits || j >= n_qubits || i == j) {
        throw ContractError("invalid site pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
}

// If rho is invariant under the global spin flip on both sides, its support
// lies in one parity sector. Returns the sector block in the basis
// (|b> + |~b>)/sqrt(2), b with top bit clear, or an empty matrix.
template <typename M>
M parity_block(const M &rho) {
    const int dim = static_cast<int>(rho.rows());
    const int flip = dim - 1;
    double scale = rho.cwiseAbs().maxCoeff();
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            if (std::abs(rho(r ^ flip, c) - rho(r, c)) > 1e-13 * std::max(1.0, scale)) {
                return M();
            }
        }
    }
    const int half = dim / 2;
    return 2.0 * rho.topLeftCorner(half, half);
}

template <typename M>
std::vector<double> fidelities_from_density(const M &rho, int n_qubits, const std::vector<protocols::SitePair> &pairs) {
    M block = parity_block(rho);
    bool reduced = block.size() > 0;
    const M &work = reduced ? block : rho;
    M root = qsim::psd_sqrt(work);
    std::vector<double> out;
    out.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        Eigen::VectorXd sign = zz_signs(n_qubits, i, j);
        if (reduced) {
            sign.conservativeResize(work.rows());
        }
        M inner = root * sign.asDiagonal() * root;
        Eigen::SelfAdjointEigenSolver<M> solver(inner, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("fidelity correlator: eigendecomposition failed");
        }
        double tr = solver.eigenvalues().cwiseAbs().sum();
        out.push_back(tr * tr);
    }
    return out;
}

double sum_squares(const std::vector<double> &v, double mean) {
    double s = 0;
    for (double x : v) {
        s += (x - mean) * (x - mean);
    }
    return s;
}

struct LineFit {
    double intercept;
    double slope;
    double r_squared;
};

LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    double slope = sxx > 0 ? sxy / sxx : 0.0;
    double intercept = my - slope * mx;
    double ss_tot = sum_squares(y, my);
    double ss_res = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        double e = y[k] - intercept - slope * x[k];
        ss_res += e * e;
    }
    double r2 = ss_tot > 0 ? std::max(0.0, 1 - ss_res / ss_tot) : 1.0;
    return {intercept, slope, r2};
}

// Best R^2 of y = A + B g(t) over a grid of shape parameters.
template <typename Shape>
std::pair<double, double> best_shape_fit(const std::vector<double> &t, const std::vector<double> &y,
                                         const std::vector<double> &params, Shape shape) {
    double best_r2 = -std::numeric_limits<double>::infinity();
    double best_param = params.empty() ? 0.0 : params.front();
    std::vector<double> g(t.size());
    for (double p : params) {
        for (size_t k = 0; k < t.size(); ++k) {
            g[k] = shape(t[k], p);
        }
        LineFit f = fit_line(g, y);
        if (f.r_squared > best_r2) {
            best_r2 = f.r_squared;
            best_param = p;
        }
    }
    return {std::max(0.0, best_r2), best_param};
}

}  // namespace

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::EA:
            return "ea";
        case Kind::Fidelity:
            return "fidelity";
        case Kind::Renyi2:
            return "renyi2";
    }
    return "?";
}

std::string to_string(Growth growth) {
    switch (growth) {
        case Growth::Exponential:
            return "exponential";
        case Growth::Linear:
            return "linear";
        case Growth::Saturating:
            return "saturating";
    }
    return "?";
}

double ea_correlator(const protocols::EnsembleStatistics &stats, int round, int i, int j) {
    return stats.zz_squared[checked_record(stats, round)][checked_pair(stats, i, j)].mean;
}

double fidelity_correlator(const protocols::EnsembleStatistics &stats, int round, int i, int j) {
    return stats.fidelity[checked_record(stats, round)][checked_pair(stats, i, j)].mean;
}

std::vector<double> fidelity_correlators(const QuantumState &state, const std::vector<protocols::SitePair> &pairs) {
    const int n = state.n_qubits();
    for (auto [i, j] : pairs) {
        check_pair(n, i, j);
    }
    if (std::abs(state.trace() - 1) > 1e-6) {
        throw ContractError("fidelity correlator: state is not normalized");
    }
    if (state.is_pure()) {
        std::vector<double> out;
        for (auto [i, j] : pairs) {
            double e = qsim::expectation_pauli(state, qsim::PauliOperator::zz(i, j, n));
            out.push_back(e * e);
        }
        return out;
    }
    const Matrix &rho = state.density();
    if (rho.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::MatrixXd real = rho.real();
        return fidelities_from_density(real, n, pairs);
    }
    return fidelities_from_density(rho, n, pairs);
}

double fidelity_correlator(const QuantumState &state, int i, int j) {
    return fidelity_correlators(state, {{i, j}}).front();
}

double renyi2_correlator(const QuantumState &state, int i, int j) {
    const int n = state.n_qubits();
    check_pair(n, i, j);
    if (state.is_pure()) {
        double e = qsim::expectation_pauli(state, qsim::PauliOperator::zz(i, j, n));
        return e * e;
    }
    const Matrix &rho = state.density();
    double purity = rho.squaredNorm();
    if (purity <= 1e-12) {
        throw NumericalError("renyi2 correlator: purity is numerically zero");
    }
    Eigen::VectorXd sign = zz_signs(n, i, j);
    double overlap = (sign.asDiagonal() * rho.cwiseAbs2() * sign.asDiagonal()).sum();
    return std::clamp(overlap / purity, 0.0, 1.0);
}

CorrelatorSeries make_series(const protocols::EnsembleStatistics &stats, Kind kind, int round) {
    const int rec = checked_record(stats, round);
    const auto &table = kind == Kind::EA ? stats.zz_squared : (kind == Kind::Fidelity ? stats.fidelity : stats.renyi2);
    std::map<int, std::pair<double, double>> acc;
    std::map<int, int> count;
    for (size_t k = 0; k < stats.pairs.size(); ++k) {
        int r = std::abs(stats.pairs[k].second - stats.pairs[k].first);
        const auto &e = table[rec][k];
        acc[r].first += e.mean;
        acc[r].second += e.std_error * e.std_error;
        count[r] += 1;
    }
    CorrelatorSeries series;
    series.kind = kind;
    series.round = round;
    for (auto &[r, v] : acc) {
        double c = count[r];
        series.points.push_back({r, v.first / c, std::sqrt(v.second) / c});
    }
    return series;
}

FitWindow default_window(int L, qsim::Boundary boundary) {
    if (boundary == qsim::Boundary::Periodic) {
        return {1, L / 2};
    }
    return {1, L - 2};
}

LengthFit fit_correlation_length(const CorrelatorSeries &series, FitWindow window, double floor) {
    std::vector<double> x, y;
    int last = std::numeric_limits<int>::min();
    for (const auto &p : series.points) {
        if (p.distance <= last) {
            throw ContractError("series distances must be strictly increasing");
        }
        last = p.distance;
        if (p.distance < window.r_min || p.distance > window.r_max) {
            continue;
        }
        if (!(p.value > 0)) {
            throw ContractError("non-positive correlator value at distance " + std::to_string(p.distance));
        }
        x.push_back(p.distance);
        y.push_back(std::log(std::max(p.value, floor)));
    }
    if (x.size() < 3) {
        throw ContractError("correlation length fit needs at least 3 points in the window");
    }
    LineFit f = fit_line(x, y);
    LengthFit out;
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r_squared = f.r_squared;
    out.window = window;
    out.n_points = static_cast<int>(x.size());
    if (f.slope >= -1e-6) {
        out.infinite = true;
        out.xi = std::numeric_limits<double>::infinity();
    } else {
        out.xi = -1.0 / f.slope;
    }
    return out;
}

double map_discrete_to_continuous(double beta, int rounds) {
    double t = std::tanh(beta);
    return rounds * t * t / 8.0;
}

GrowthFits fit_growth(const std::vector<double> &t, const std::vector<double> &y) {
    if (t.size() != y.size() || t.size() < 4) {
        throw ContractError("growth fit needs at least 4 matching samples");
    }
    double span = *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
    if (!(span > 0)) {
        throw ContractError("growth fit needs distinct times");
    }
    GrowthFits out;
    out.linear_r2 = fit_line(t, y).r_squared;
    constexpr int kRates = 300;
    std::vector<double> rates;
    for (int k = 0; k < kRates; ++k) {
        rates.push_back(std::exp(std::log(1.0 / span) + std::log(30.0) * k / (kRates - 1)));
    }
    double t0 = *std::min_element(t.begin(), t.end());
    auto [er2, erate] = best_shape_fit(t, y, rates, [t0](double tt, double k) { return std::exp(k * (tt - t0)); });
    auto [sr2, srate] = best_shape_fit(t, y, rates, [t0](double tt, double k) { return -std::exp(-k * (tt - t0)); });
    out.exponential_r2 = er2;
    out.exponential_rate = erate;
    out.saturating_r2 = sr2;
    out.saturating_scale = 1.0 / srate;
    return out;
}

Growth classify_growth(const GrowthFits &fits) {
    if (fits.linear_r2 >= fits.exponential_r2 && fits.linear_r2 >= fits.saturating_r2) {
        return Growth::Linear;
    }
    return fits.exponential_r2 >= fits.saturating_r2 ? Growth::Exponential : Growth::Saturating;
}

}  // namespace nml::correlators
