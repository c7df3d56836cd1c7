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

#ifndef NML_ANALYTIC1D_HPP
#define NML_ANALYTIC1D_HPP

#include <string>

namespace nml::analytic1d {

/// Measurement rate J and final time t_f of a continuous-time chain. Only the
/// product J t_f enters the formulas below.
struct Analytic1DParams {
    double J = 1.0;
    double t_f = 1.0;

    double product() const;
};

struct EaLength {
    double xi = 0.0;
    /// Weight of the ordered configurations fell below the smallest normal double.
    bool underflow = false;
};

struct EaQuadratureOptions {
    double relative_tolerance = 1e-10;
    /// Integration cut is 1 + range_sigmas / sqrt(8 J t_f).
    double range_sigmas = 10.0;
};

/// Correlation length of the Edwards-Anderson correlator of a chain under its
/// ZZ measurement only, from the Gaussian outcome integral.
EaLength xi_ea_zz_only(double jt, const EaQuadratureOptions &options = {});

/// Large J t_f form of xi_ea_zz_only: (4 / sqrt(pi)) sqrt(J t_f) exp(4 J t_f).
double xi_ea_asymptotic(double jt);

/// -1 / log tanh(4 J t_f).
double xi_renyi2(double jt);

/// tanh(4 J t_f)^r.
double renyi2_correlator_closed(int r, double jt);

/// Self-dual point h/J of the chain with both measurements.
double duality_critical_point();

enum class Regime { ExponentialGrowth, LinearGrowth, Saturating };

/// Finite-t_f behaviour of the correlation length at a given h/J.
Regime regime(double h_over_j);
std::string to_string(Regime regime);

}  // namespace nml::analytic1d

#endif
