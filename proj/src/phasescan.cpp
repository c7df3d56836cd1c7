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

#include "nml/phasescan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "nml/numerics.hpp"
#include "nml/protocols.hpp"

namespace nml::phasescan {

using meanfield::Phase;
using meanfield::PhasePoint;

namespace {

void check_axis(const std::vector<double> &axis, const char *name) {
    if (axis.empty()) {
        throw ContractError(std::string(name) + " axis is empty");
    }
    for (size_t k = 0; k < axis.size(); ++k) {
        if (!std::isfinite(axis[k])) {
            throw ContractError(std::string(name) + " axis has a non-finite value");
        }
        if (k > 0 && !(axis[k] > axis[k - 1])) {
            throw ContractError(std::string(name) + " axis must be strictly increasing");
        }
    }
}

void parallel_for(size_t n, int workers, const std::function<void(size_t)> &body) {
    if (workers <= 0) {
        workers = protocols::default_workers();
    }
    workers = static_cast<int>(std::min<size_t>(static_cast<size_t>(workers), std::max<size_t>(n, 1)));
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= n) {
                return;
            }
            try {
                body(idx);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Bisects in log t_f between two differing labels. A midpoint carrying a
// third label splits the bracket, so narrow intermediate phases are kept.
void refine_bracket(const ScanGrid &grid, double h, double lo, Phase lo_label, double hi, Phase hi_label, double tol,
                    std::vector<Transition> &out) {
    while (hi - lo > tol * hi) {
        double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        Phase label = meanfield::classify_point(grid.mode, grid.d, grid.J, h, mid).label;
        if (label == lo_label) {
            lo = mid;
        } else if (label == hi_label) {
            hi = mid;
        } else {
            refine_bracket(grid, h, lo, lo_label, mid, label, tol, out);
            refine_bracket(grid, h, mid, label, hi, hi_label, tol, out);
            return;
        }
    }
    Transition t;
    t.from = lo_label;
    t.to = hi_label;
    t.tf_below = lo;
    t.tf_above = hi;
    t.tf_refined = 0.5 * (lo + hi);
    out.push_back(t);
}

}  // namespace

void ScanGrid::validate() const {
    if (d < 1 || !(J > 0)) {
        throw ContractError("scan grid needs d >= 1 and J > 0");
    }
    check_axis(h_values, "h");
    check_axis(tf_values, "t_f");
    if (h_values.front() < 0) {
        throw ContractError("h values must be nonnegative");
    }
    if (!(tf_values.front() > 0)) {
        throw ContractError("t_f values must be positive");
    }
}

ScanGrid ScanGrid::default_grid(Readout mode, int d, double J, int n_h, int n_tf) {
    if (n_h < 2 || n_tf < 2) {
        throw ContractError("default grid needs at least two points per axis");
    }
    double hc =
        mode == Readout::Complete ? meanfield::complete_stationary_hc(d, J) : meanfield::partial_stationary_hc(d, J);
    ScanGrid grid;
    grid.mode = mode;
    grid.d = d;
    grid.J = J;
    for (int i = 0; i < n_h; ++i) {
        grid.h_values.push_back(1.5 * hc * i / (n_h - 1));
    }
    const double lo = std::log(1e-3);
    const double hi = std::log(10.0);
    for (int k = 0; k < n_tf; ++k) {
        grid.tf_values.push_back(std::exp(lo + (hi - lo) * k / (n_tf - 1)));
    }
    grid.tf_values.back() = 10.0;
    return grid;
}

const PhasePoint &ScanResult::cell(size_t h_index, size_t tf_index) const {
    return cells.at(h_index * grid.tf_values.size() + tf_index);
}

std::optional<double> ScanResult::critical_tf(size_t h_index) const {
    const auto &column = transitions.at(h_index);
    if (column.empty()) {
        return std::nullopt;
    }
    return column.front().tf_refined;
}

std::optional<double> ScanResult::onset(size_t h_index, Phase phase) const {
    for (const auto &t : transitions.at(h_index)) {
        if (t.to == phase) {
            return t.tf_refined;
        }
    }
    return std::nullopt;
}

std::vector<Phase> ScanResult::sequence(size_t h_index) const {
    std::vector<Phase> out{cell(h_index, 0).label};
    for (const auto &t : transitions.at(h_index)) {
        out.push_back(t.to);
    }
    return out;
}

ScanResult scan(const ScanGrid &grid, const ScanOptions &options) {
    grid.validate();
    ScanResult result;
    result.grid = grid;
    const size_t nh = grid.h_values.size();
    const size_t nt = grid.tf_values.size();
    result.cells.resize(nh * nt);
    parallel_for(nh * nt, options.workers, [&](size_t idx) {
        size_t i = idx / nt;
        size_t k = idx % nt;
        result.cells[idx] = meanfield::classify_point(grid.mode, grid.d, grid.J, grid.h_values[i], grid.tf_values[k]);
    });

    result.transitions.resize(nh);
    for (size_t i = 0; i < nh; ++i) {
        for (size_t k = 1; k < nt; ++k) {
            Phase a = result.cell(i, k - 1).label;
            Phase b = result.cell(i, k).label;
            if (a != b) {
                Transition t;
                t.from = a;
                t.to = b;
                t.tf_below = grid.tf_values[k - 1];
                t.tf_above = grid.tf_values[k];
                t.tf_refined = 0.5 * (t.tf_below + t.tf_above);
                result.transitions[i].push_back(t);
            }
        }
    }
    if (options.refine) {
        std::vector<std::pair<size_t, size_t>> jobs;
        for (size_t i = 0; i < nh; ++i) {
            for (size_t j = 0; j < result.transitions[i].size(); ++j) {
                jobs.emplace_back(i, j);
            }
        }
        std::vector<std::vector<Transition>> refined(jobs.size());
        parallel_for(jobs.size(), options.workers, [&](size_t n) {
            auto [i, j] = jobs[n];
            const Transition &t = result.transitions[i][j];
            refine_bracket(grid, grid.h_values[i], t.tf_below, t.from, t.tf_above, t.to,
                           options.refine_relative_tolerance, refined[n]);
        });
        for (auto &column : result.transitions) {
            column.clear();
        }
        for (size_t n = 0; n < jobs.size(); ++n) {
            auto &column = result.transitions[jobs[n].first];
            column.insert(column.end(), refined[n].begin(), refined[n].end());
        }
    }
    return result;
}

std::string to_string(PropagatorKind kind) {
    switch (kind) {
        case PropagatorKind::DZ:
            return "dz";
        case PropagatorKind::DR:
            return "dr";
        case PropagatorKind::DK:
            return "dk";
    }
    return "?";
}

PropagatorKind parse_propagator_kind(const std::string &text) {
    if (text == "dz") {
        return PropagatorKind::DZ;
    }
    if (text == "dr") {
        return PropagatorKind::DR;
    }
    if (text == "dk") {
        return PropagatorKind::DK;
    }
    throw ContractError("unknown propagator '" + text + "' (expected dz, dr or dk)");
}

std::vector<PropagatorSample> propagator_curve(PropagatorKind kind, const PropagatorParams &params,
                                               const std::vector<double> &dt_samples) {
    std::function<double(double)> eval;
    switch (kind) {
        case PropagatorKind::DZ:
            eval = [&](double dt) { return meanfield::dz_propagator(params.h, params.t_f, dt); };
            break;
        case PropagatorKind::DR:
            eval = [&](double dt) { return meanfield::dr_propagator(params.R, params.h, params.t_f, dt); };
            break;
        case PropagatorKind::DK: {
            auto coupling = std::make_shared<meanfield::KeldyshPropagator>(
                meanfield::KeldyshPropagator::at_saddle(params.d, params.J, params.h, params.t_f));
            // Sign check of the saddle field, once.
            meanfield::dk_propagator(params.d, params.J, params.h, params.t_f, 0.25 * params.t_f);
            eval = [coupling](double dt) { return (*coupling)(dt); };
            break;
        }
    }
    std::vector<PropagatorSample> out;
    out.reserve(dt_samples.size());
    for (double dt : dt_samples) {
        PropagatorSample s;
        s.dt = dt;
        s.value = eval(dt);
        s.reflection_residual = std::abs(s.value - eval(params.t_f - dt));
        out.push_back(s);
    }
    return out;
}

std::vector<double> uniform_lags(double t_f, int n) {
    if (!(t_f > 0) || n < 2) {
        throw ContractError("uniform_lags needs t_f > 0 and n >= 2");
    }
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        out.push_back(t_f * k / (n - 1));
    }
    out.back() = t_f;
    return out;
}

}  // namespace nml::phasescan
