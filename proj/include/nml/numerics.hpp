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

#ifndef NML_NUMERICS_HPP
#define NML_NUMERICS_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace nml {

/// Violated precondition on an argument (bad size, bad operator, bad config).
class ContractError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the region where a closed form is defined.
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to converge or lost all precision.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

namespace numerics {

/// log(cosh(x)) without overflow for any finite x.
double log_cosh(double x);

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

/// log(sum_i exp(xs[i])); returns -inf for an empty span.
double log_sum_exp(std::span<const double> xs);

/// Signed log-sum-exp: terms are sign_i * exp(log_i). Returns the log of the
/// absolute value of the sum and writes its sign to `sign`.
double signed_log_sum_exp(std::span<const double> logs, std::span<const int> signs, int &sign);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (31 point rule) integration of f over [a, b] to the
/// given relative tolerance.
QuadratureResult integrate(const std::function<double(double)> &f, double a, double b, double relative_tolerance,
                           int max_depth = 15);

/// Bisection for a sign change of f on [lo, hi]. Requires f(lo) and f(hi) of
/// opposite sign (either may be zero). Stops when the bracket is narrower than
/// absolute_tolerance or collapses to adjacent doubles.
double bisect_root(const std::function<double(double)> &f, double lo, double hi, double absolute_tolerance);

}  // namespace numerics
}  // namespace nml

#endif
