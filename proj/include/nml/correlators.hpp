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

#ifndef NML_CORRELATORS_HPP
#define NML_CORRELATORS_HPP

#include <string>
#include <utility>
#include <vector>

#include "nml/protocols.hpp"
#include "nml/qsim.hpp"

namespace nml::correlators {

enum class Kind { EA, Fidelity, Renyi2 };

std::string to_string(Kind kind);

struct SeriesPoint {
    int distance;
    double value;
    double std_error;
};

/// Correlator values of one round, ordered by strictly increasing distance.
struct CorrelatorSeries {
    Kind kind = Kind::EA;
    int round = 0;
    std::vector<SeriesPoint> points;
};

struct FitWindow {
    int r_min;
    int r_max;
};

struct LengthFit {
    double xi = 0.0;
    bool infinite = false;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    FitWindow window{0, 0};
    int n_points = 0;
};

constexpr double kDefaultFloor = 1e-8;

/// Mean over trajectories of <Z_i Z_j>^2 at the given round.
double ea_correlator(const protocols::EnsembleStatistics &stats, int round, int i, int j);
double fidelity_correlator(const protocols::EnsembleStatistics &stats, int round, int i, int j);

/// F(rho, P rho P) for P = Z_i Z_j.
double fidelity_correlator(const qsim::QuantumState &state, int i, int j);
/// Same for several pairs, sharing one square root of rho.
std::vector<double> fidelity_correlators(const qsim::QuantumState &state,
                                         const std::vector<protocols::SitePair> &pairs);

/// tr(rho P rho P) / tr(rho^2) for P = Z_i Z_j.
double renyi2_correlator(const qsim::QuantumState &state, int i, int j);

/// Builds the distance series for one round from tracked pairs. Pairs sharing
/// a distance are averaged.
CorrelatorSeries make_series(const protocols::EnsembleStatistics &stats, Kind kind, int round);

/// Default window [1, L-2] on an open chain, [1, L/2] on a ring.
FitWindow default_window(int L, qsim::Boundary boundary);

/// Least squares line through (r, ln value) inside the window. Values are
/// floored at `floor` before the log. xi = -1/slope, or infinite when the
/// slope is at least -1e-6.
LengthFit fit_correlation_length(const CorrelatorSeries &series, FitWindow window, double floor = kDefaultFloor);

/// T tanh^2(beta) / 8.
double map_discrete_to_continuous(double beta, int rounds);

/// Linear, exponential and saturating fits of a growth curve y(t).
struct GrowthFits {
    double linear_r2 = 0.0;
    double exponential_r2 = 0.0;
    double saturating_r2 = 0.0;
    double exponential_rate = 0.0;
    double saturating_scale = 0.0;
};

enum class Growth { Exponential, Linear, Saturating };

std::string to_string(Growth growth);

/// R^2 of y = A + B t, y = A + B exp(k (t - t0)) and y = A - B exp(-k (t - t0)),
/// with k log spaced over [1, 30] / (t_max - t0). R^2 is computed on y in
/// every case; the curved fits report their best k.
GrowthFits fit_growth(const std::vector<double> &t, const std::vector<double> &y);

/// Model with the highest R^2.
Growth classify_growth(const GrowthFits &fits);

}  // namespace nml::correlators

#endif
