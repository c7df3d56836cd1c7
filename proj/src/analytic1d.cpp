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

#include "nml/analytic1d.hpp"

#include <cfloat>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "nml/numerics.hpp"

namespace nml::analytic1d {

namespace {

void require_positive(double jt) {
    if (!(jt > 0) || !std::isfinite(jt)) {
        throw ContractError("J t_f must be finite and positive");
    }
}

// Integrates f over [0, cut] with extra break points at multiples of `width`
// so that narrow features near the origin and near s = 1 are resolved.
double integrate_half_line(const std::function<double(double)> &f, double cut, double width, double tol) {
    std::vector<double> edges{0.0};
    for (double w : {width, 4 * width, 16 * width}) {
        if (w < cut) {
            edges.push_back(w);
        }
    }
    for (double p : {1.0 - 4 * width, 1.0, 1.0 + 4 * width}) {
        if (p > edges.back() && p < cut) {
            edges.push_back(p);
        }
    }
    edges.push_back(cut);
    double total = 0.0;
    for (size_t k = 0; k + 1 < edges.size(); ++k) {
        total += numerics::integrate(f, edges[k], edges[k + 1], tol).value;
    }
    return total;
}

}  // namespace

double Analytic1DParams::product() const {
    if (!(J > 0) || !(t_f > 0)) {
        throw ContractError("J and t_f must be positive");
    }
    return J * t_f;
}

EaLength xi_ea_zz_only(double jt, const EaQuadratureOptions &options) {
    require_positive(jt);
    const double a = jt;
    const double sigma = 1.0 / std::sqrt(8.0 * a);
    const double cut = 1.0 + options.range_sigmas * sigma;
    const double width = 1.0 / (8.0 * a);
    const double norm = std::sqrt(4.0 * a / std::numbers::pi);
    const double tol = options.relative_tolerance;

    // Disordered weight E[sech^2(8 a s)] over the two-peak outcome density;
    // cosh * sech^2 = sech keeps every term bounded.
    auto complement_density = [a](double s) {
        double q = std::exp(-16.0 * a * s);
        return 2.0 * std::exp(-4.0 * a * (s + 1.0) * (s + 1.0)) / (1.0 + q);
    };
    double complement = 2.0 * norm * integrate_half_line(complement_density, cut, width, tol);

    double log_weight;
    double weight;
    if (complement < 0.5) {
        log_weight = std::log1p(-complement);
        weight = 1.0 - complement;
    } else {
        auto ordered_density = [a](double s) {
            double t = std::tanh(8.0 * a * s);
            double g = std::exp(-4.0 * a * (s - 1.0) * (s - 1.0)) + std::exp(-4.0 * a * (s + 1.0) * (s + 1.0));
            return 0.5 * g * t * t;
        };
        weight = 2.0 * norm * integrate_half_line(ordered_density, cut, width, tol);
        log_weight = std::log(weight);
    }
    EaLength out;
    out.underflow = weight < DBL_MIN;
    out.xi = out.underflow ? 0.0 : -1.0 / log_weight;
    return out;
}

double xi_ea_asymptotic(double jt) {
    require_positive(jt);
    return 4.0 / std::sqrt(std::numbers::pi) * std::sqrt(jt) * std::exp(4.0 * jt);
}

double xi_renyi2(double jt) {
    require_positive(jt);
    double q = std::exp(-8.0 * jt);
    double log_tanh = std::log1p(-q) - std::log1p(q);
    return -1.0 / log_tanh;
}

double renyi2_correlator_closed(int r, double jt) {
    if (r < 0) {
        throw ContractError("distance must be nonnegative");
    }
    if (!(jt >= 0)) {
        throw ContractError("J t_f must be nonnegative");
    }
    if (r == 0) {
        return 1.0;
    }
    return std::pow(std::tanh(4.0 * jt), r);
}

double duality_critical_point() {
    return 1.0;
}

Regime regime(double h_over_j) {
    if (!(h_over_j >= 0) || !std::isfinite(h_over_j)) {
        throw ContractError("h/J must be finite and nonnegative");
    }
    if (h_over_j < duality_critical_point()) {
        return Regime::ExponentialGrowth;
    }
    if (h_over_j > duality_critical_point()) {
        return Regime::Saturating;
    }
    return Regime::LinearGrowth;
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::ExponentialGrowth:
            return "exponential growth";
        case Regime::LinearGrowth:
            return "linear growth";
        case Regime::Saturating:
            return "saturates";
    }
    return "?";
}

}  // namespace nml::analytic1d
