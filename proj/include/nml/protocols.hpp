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

#ifndef NML_PROTOCOLS_HPP
#define NML_PROTOCOLS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nml/qsim.hpp"
#include "nml/readout.hpp"

namespace nml::protocols {

using nml::Readout;

using SitePair = std::pair<int, int>;

struct ProtocolConfig {
    int L = 6;
    qsim::Boundary boundary = qsim::Boundary::Open;
    double beta_z = 0.1;
    double beta_x = 0.0;
    int rounds = 60;
    Readout readout = Readout::Complete;
    int n_trajectories = 2000;
    uint64_t master_seed = 0;
    /// Observables are recorded after rounds 0, k, 2k, ... for k = record_every.
    int record_every = 1;
    /// Pairs to track. Empty means one center-symmetric pair per distance.
    std::vector<SitePair> observables;
};

/// Throws ContractError on an invalid configuration.
void validate(const ProtocolConfig &config);

/// One pair per distance r = 1..L-1, placed symmetrically about the chain
/// center: i = floor((L-1)/2 - r/2), j = i + r.
std::vector<SitePair> center_pairs(int L);

/// Tracked pairs of a config after applying the default.
std::vector<SitePair> tracked_pairs(const ProtocolConfig &config);

/// Bonds of the chain in ascending order.
std::vector<SitePair> chain_bonds(int L, qsim::Boundary boundary);

/// Observables after a given number of complete rounds, one entry per
/// tracked pair.
struct RoundRecord {
    int round = 0;
    std::vector<double> zz;
    std::vector<double> fidelity;
    std::vector<double> renyi2;
    std::optional<qsim::QuantumState> snapshot;
};

/// Recorded outcomes per round. X outcomes only in complete readout.
struct TrajectoryOutcome {
    std::vector<std::vector<int>> zz_outcomes;
    std::vector<std::vector<int>> x_outcomes;
};

struct TrajectoryResult {
    std::vector<RoundRecord> records;  // records[0] is the initial state
    TrajectoryOutcome outcomes;
};

struct TrajectoryOptions {
    bool keep_snapshots = false;
    bool compute_fidelity = true;
    bool compute_renyi2 = true;
};

TrajectoryResult run_trajectory(const ProtocolConfig &config, uint64_t trajectory_index,
                                const TrajectoryOptions &options = {});

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Per recorded round (outer index) and per tracked pair (inner index).
struct EnsembleStatistics {
    std::vector<SitePair> pairs;
    std::vector<int> round_numbers;
    int n_trajectories = 0;
    std::vector<std::vector<Estimate>> zz;
    std::vector<std::vector<Estimate>> zz_squared;
    std::vector<std::vector<Estimate>> fidelity;
    std::vector<std::vector<Estimate>> renyi2;
    std::vector<std::string> warnings;

    /// Index of pair (i, j) in `pairs`, or -1.
    int pair_index(int i, int j) const;
    /// Index of a round in `round_numbers`, or -1.
    int record_index(int round) const;
};

/// Number of workers from NML_WORKERS or the hardware, at least 1.
int default_workers();

/// Runs n_trajectories trajectories on `workers` threads. The result is
/// bit-identical for any worker count.
EnsembleStatistics run_ensemble(const ProtocolConfig &config, int workers = 0, const TrajectoryOptions &options = {});

}  // namespace nml::protocols

#endif
