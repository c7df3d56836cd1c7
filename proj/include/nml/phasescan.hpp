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

#ifndef NML_PHASESCAN_HPP
#define NML_PHASESCAN_HPP

#include <optional>
#include <string>
#include <vector>

#include "nml/meanfield.hpp"
#include "nml/readout.hpp"

namespace nml::phasescan {

struct ScanGrid {
    Readout mode = Readout::Partial;
    int d = 6;
    double J = 1.0;
    std::vector<double> h_values;
    std::vector<double> tf_values;

    /// Nonempty, strictly increasing axes.
    void validate() const;
    /// 80 h values linear in [0, 1.5 h_c] by 80 t_f values log spaced in [1e-3, 10].
    static ScanGrid default_grid(Readout mode, int d, double J, int n_h = 80, int n_tf = 80);
};

/// One label change along t_f at fixed h.
struct Transition {
    meanfield::Phase from = meanfield::Phase::Trivial;
    meanfield::Phase to = meanfield::Phase::Trivial;
    double tf_below = 0.0;  // largest sampled t_f with `from`
    double tf_above = 0.0;  // smallest sampled t_f with `to`
    double tf_refined = 0.0;
};

struct ScanOptions {
    int workers = 0;  // 0 means default_workers()
    bool refine = true;
    double refine_relative_tolerance = 1e-4;
};

struct ScanResult {
    ScanGrid grid;
    /// Row major: cells[i * tf_values.size() + k] is (h_values[i], tf_values[k]).
    std::vector<meanfield::PhasePoint> cells;
    /// Per h value, every label change in increasing t_f. After refinement a
    /// coarse change may split in two when a narrow phase lies between.
    std::vector<std::vector<Transition>> transitions;

    const meanfield::PhasePoint &cell(size_t h_index, size_t tf_index) const;
    /// Smallest t_f of any label change in the column, if one exists.
    std::optional<double> critical_tf(size_t h_index) const;
    /// Smallest t_f where the column enters `phase`, if it does.
    std::optional<double> onset(size_t h_index, meanfield::Phase phase) const;
    /// Labels met along one column, first cell then each transition.
    std::vector<meanfield::Phase> sequence(size_t h_index) const;
};

ScanResult scan(const ScanGrid &grid, const ScanOptions &options = {});

enum class PropagatorKind { DZ, DR, DK };
std::string to_string(PropagatorKind kind);
PropagatorKind parse_propagator_kind(const std::string &text);

struct PropagatorParams {
    int d = 6;
    double J = 1.0;
    double h = 0.0;
    double t_f = 0.5;
    int R = 2;
};

struct PropagatorSample {
    double dt = 0.0;
    double value = 0.0;
    /// |D(dt) - D(t_f - dt)|.
    double reflection_residual = 0.0;
};

std::vector<PropagatorSample> propagator_curve(PropagatorKind kind, const PropagatorParams &params,
                                               const std::vector<double> &dt_samples);

/// n evenly spaced lags covering [0, t_f].
std::vector<double> uniform_lags(double t_f, int n);

}  // namespace nml::phasescan

#endif
