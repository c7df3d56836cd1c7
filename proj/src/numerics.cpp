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

#include "nml/numerics.hpp"
#include "nml/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace nml::numerics {

double log_cosh(double x) {
    double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    double hi = std::max(a, b);
    double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        hi = std::max(hi, x);
    }
    if (hi == -std::numeric_limits<double>::infinity()) {
        return hi;
    }
    double acc = 0.0;
    for (double x : xs) {
        acc += std::exp(x - hi);
    }
    return hi + std::log(acc);
}

double signed_log_sum_exp(std::span<const double> logs, std::span<const int> signs, int &sign) {
    if (logs.size() != signs.size()) {
        throw ContractError("signed_log_sum_exp: size mismatch");
    }
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : logs) {
        hi = std::max(hi, x);
    }
    if (hi == -std::numeric_limits<double>::infinity()) {
        sign = 0;
        return hi;
    }
    double acc = 0.0;
    for (size_t k = 0; k < logs.size(); ++k) {
        acc += signs[k] * std::exp(logs[k] - hi);
    }
    sign = acc > 0 ? 1 : (acc < 0 ? -1 : 0);
    return hi + std::log(std::abs(acc));
}

QuadratureResult integrate(const std::function<double(double)> &f, double a, double b, double relative_tolerance,
                           int max_depth) {
    QuadratureResult out;
    if (a == b) {
        return out;
    }
    // Evaluated on the unit interval.
    const double width = b - a;
    auto unit = [&](double u) { return width * f(a + width * u); };
    double l1 = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        unit, 0.0, 1.0, static_cast<unsigned>(max_depth), relative_tolerance, &out.error_estimate, &l1);
    if (!std::isfinite(out.value)) {
        throw NumericalError("integrate: non-finite result");
    }
    return out;
}

double bisect_root(const std::function<double(double)> &f, double lo, double hi, double absolute_tolerance) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0) {
        return lo;
    }
    if (fhi == 0) {
        return hi;
    }
    if ((flo > 0) == (fhi > 0)) {
        throw NumericalError("bisect_root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "], f(lo)=" + std::to_string(flo) + ", f(hi)=" + std::to_string(fhi));
    }
    std::uintmax_t max_iter = 2000;
    auto tol = [absolute_tolerance](double x, double y) { return std::abs(x - y) <= absolute_tolerance; };
    auto bracket = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
    return 0.5 * (bracket.first + bracket.second);
}

}  // namespace nml::numerics

namespace nml {

std::string to_string(Readout readout) {
    switch (readout) {
        case Readout::Complete:
            return "complete";
        case Readout::None:
            return "none";
        case Readout::Partial:
            return "partial";
    }
    return "?";
}

Readout parse_readout(const std::string &text) {
    if (text == "complete") {
        return Readout::Complete;
    }
    if (text == "none") {
        return Readout::None;
    }
    if (text == "partial") {
        return Readout::Partial;
    }
    throw ContractError("unknown readout mode '" + text + "' (expected complete, none or partial)");
}

}  // namespace nml
