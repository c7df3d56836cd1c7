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

#include "nml/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "nml/correlators.hpp"

namespace nml::protocols {

using qsim::PauliOperator;
using qsim::QuantumState;

void validate(const ProtocolConfig &config) {
    if (config.L < 2 || config.L > qsim::kMaxQubits) {
        throw ContractError("chain length L=" + std::to_string(config.L) + " outside [2, 14]");
    }
    if (!(config.beta_z >= 0) || !std::isfinite(config.beta_z) || !(config.beta_x >= 0) ||
        !std::isfinite(config.beta_x)) {
        throw ContractError("measurement strengths must be finite and nonnegative");
    }
    if (config.rounds < 1) {
        throw ContractError("rounds must be at least 1");
    }
    if (config.record_every < 1) {
        throw ContractError("record_every must be at least 1");
    }
    if (config.n_trajectories < 1) {
        throw ContractError("n_trajectories must be at least 1");
    }
    for (auto [i, j] : config.observables) {
        if (i < 0 || j < 0 || i >= config.L || j >= config.L || i == j) {
            throw ContractError("tracked pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") invalid for L=" + std::to_string(config.L));
        }
    }
}

std::vector<SitePair> center_pairs(int L) {
    std::vector<SitePair> out;
    double center = (L - 1) / 2.0;
    for (int r = 1; r < L; ++r) {
        int i = static_cast<int>(std::floor(center - r / 2.0));
        out.emplace_back(i, i + r);
    }
    return out;
}

std::vector<SitePair> tracked_pairs(const ProtocolConfig &config) {
    if (config.observables.empty()) {
        return center_pairs(config.L);
    }
    return config.observables;
}

std::vector<SitePair> chain_bonds(int L, qsim::Boundary boundary) {
    std::vector<SitePair> out;
    for (int i = 0; i + 1 < L; ++i) {
        out.emplace_back(i, i + 1);
    }
    if (boundary == qsim::Boundary::Periodic && L > 2) {
        out.emplace_back(0, L - 1);
    }
    return out;
}

int EnsembleStatistics::record_index(int round) const {
    auto it = std::lower_bound(round_numbers.begin(), round_numbers.end(), round);
    if (it == round_numbers.end() || *it != round) {
        return -1;
    }
    return static_cast<int>(it - round_numbers.begin());
}

int EnsembleStatistics::pair_index(int i, int j) const {
    for (size_t k = 0; k < pairs.size(); ++k) {
        if ((pairs[k].first == i && pairs[k].second == j) || (pairs[k].first == j && pairs[k].second == i)) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

namespace {

RoundRecord observe(int round, const QuantumState &state, const std::vector<SitePair> &pairs,
                    const TrajectoryOptions &options) {
    RoundRecord rec;
    rec.round = round;
    const int n = state.n_qubits();
    for (auto [i, j] : pairs) {
        rec.zz.push_back(qsim::expectation_pauli(state, PauliOperator::zz(i, j, n)));
    }
    if (options.compute_fidelity) {
        rec.fidelity = correlators::fidelity_correlators(state, pairs);
    }
    if (options.compute_renyi2) {
        for (auto [i, j] : pairs) {
            rec.renyi2.push_back(correlators::renyi2_correlator(state, i, j));
        }
    }
    if (options.keep_snapshots) {
        rec.snapshot = state;
    }
    return rec;
}

}  // namespace

TrajectoryResult run_trajectory(const ProtocolConfig &config, uint64_t trajectory_index,
                                const TrajectoryOptions &options) {
    validate(config);
    const int L = config.L;
    const auto pairs = tracked_pairs(config);
    std::vector<PauliOperator> zz_ops;
    for (auto [i, j] : chain_bonds(L, config.boundary)) {
        zz_ops.push_back(PauliOperator::zz_bond(i, j, L, config.boundary));
    }
    std::vector<PauliOperator> x_ops;
    for (int i = 0; i < L; ++i) {
        x_ops.push_back(PauliOperator::x_site(i, L));
    }

    Rng rng = Rng::for_stream(config.master_seed, trajectory_index);
    QuantumState state = QuantumState::plus_state(L);
    if (config.readout != Readout::Complete) {
        state = state.promoted();
    }

    TrajectoryResult result;
    result.records.reserve(config.rounds / config.record_every + 1);
    result.records.push_back(observe(0, state, pairs, options));
    for (int round = 0; round < config.rounds; ++round) {
        std::vector<int> zz_record;
        for (const auto &op : zz_ops) {
            if (config.readout == Readout::None) {
                state = qsim::apply_dephasing_channel(std::move(state), op, config.beta_z);
            } else {
                auto m = qsim::sample_weak_measurement(std::move(state), op, config.beta_z, rng);
                state = std::move(m.state);
                zz_record.push_back(m.outcome);
            }
        }
        std::vector<int> x_record;
        for (const auto &op : x_ops) {
            if (config.readout == Readout::Complete) {
                auto m = qsim::sample_weak_measurement(std::move(state), op, config.beta_x, rng);
                state = std::move(m.state);
                x_record.push_back(m.outcome);
            } else {
                state = qsim::apply_dephasing_channel(std::move(state), op, config.beta_x);
            }
        }
        if (config.readout != Readout::None) {
            result.outcomes.zz_outcomes.push_back(std::move(zz_record));
        }
        if (config.readout == Readout::Complete) {
            result.outcomes.x_outcomes.push_back(std::move(x_record));
        }
        if ((round + 1) % config.record_every == 0) {
            result.records.push_back(observe(round + 1, state, pairs, options));
        }
    }
    return result;
}

int default_workers() {
    if (const char *env = std::getenv("NML_WORKERS")) {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(v);
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct TrajectorySummary {
    // [round][pair]
    std::vector<std::vector<double>> zz, fidelity, renyi2;
};

TrajectorySummary summarize(TrajectoryResult &&result) {
    TrajectorySummary s;
    for (auto &rec : result.records) {
        s.zz.push_back(std::move(rec.zz));
        s.fidelity.push_back(std::move(rec.fidelity));
        s.renyi2.push_back(std::move(rec.renyi2));
    }
    return s;
}

std::vector<std::vector<Estimate>> reduce(const std::vector<TrajectorySummary> &all,
                                          std::vector<std::vector<double>> TrajectorySummary::*field, bool square,
                                          size_t n_records, size_t n_pairs) {
    std::vector<std::vector<Estimate>> out(n_records, std::vector<Estimate>(n_pairs));
    const double n = static_cast<double>(all.size());
    for (size_t r = 0; r < n_records; ++r) {
        for (size_t k = 0; k < n_pairs; ++k) {
            if ((all.front().*field)[r].empty()) {
                continue;
            }
            double sum = 0;
            for (const auto &s : all) {
                double v = (s.*field)[r][k];
                sum += square ? v * v : v;
            }
            double mean = sum / n;
            double ss = 0;
            for (const auto &s : all) {
                double v = (s.*field)[r][k];
                double d = (square ? v * v : v) - mean;
                ss += d * d;
            }
            double se = all.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
            out[r][k] = {mean, se};
        }
    }
    return out;
}

}  // namespace

EnsembleStatistics run_ensemble(const ProtocolConfig &config, int workers, const TrajectoryOptions &options) {
    validate(config);
    EnsembleStatistics stats;
    int n_traj = config.n_trajectories;
    if (config.readout == Readout::None && n_traj > 1) {
        stats.warnings.push_back("readout=none is deterministic; n_trajectories=" + std::to_string(n_traj) +
                                 " collapsed to 1");
        n_traj = 1;
    }
    if (workers <= 0) {
        workers = default_workers();
    }
    workers = std::min(workers, n_traj);

    TrajectoryOptions traj_options = options;
    traj_options.keep_snapshots = false;
    std::vector<TrajectorySummary> slots(n_traj);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        while (true) {
            int idx = next.fetch_add(1);
            if (idx >= n_traj) {
                return;
            }
            try {
                slots[idx] = summarize(run_trajectory(config, static_cast<uint64_t>(idx), traj_options));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n_traj);
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

    stats.pairs = tracked_pairs(config);
    for (int r = 0; r <= config.rounds; r += config.record_every) {
        stats.round_numbers.push_back(r);
    }
    stats.n_trajectories = n_traj;
    const size_t np = stats.pairs.size();
    const size_t nr = stats.round_numbers.size();
    stats.zz = reduce(slots, &TrajectorySummary::zz, false, nr, np);
    stats.zz_squared = reduce(slots, &TrajectorySummary::zz, true, nr, np);
    stats.fidelity = reduce(slots, &TrajectorySummary::fidelity, false, nr, np);
    stats.renyi2 = reduce(slots, &TrajectorySummary::renyi2, false, nr, np);
    return stats;
}

}  // namespace nml::protocols
