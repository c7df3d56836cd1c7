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

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace nml;
using namespace nml::protocols;
using qsim::Boundary;
using qsim::Matrix;
using qsim::QuantumState;

namespace {

ProtocolConfig small_config(Readout readout, int L, double beta_z, double beta_x, int rounds, int n_traj) {
    ProtocolConfig c;
    c.L = L;
    c.readout = readout;
    c.beta_z = beta_z;
    c.beta_x = beta_x;
    c.rounds = rounds;
    c.n_trajectories = n_traj;
    c.master_seed = 1234;
    return c;
}

TrajectoryOptions snapshots() {
    TrajectoryOptions o;
    o.keep_snapshots = true;
    return o;
}

// Exact EA correlator of pair (i, j) after `rounds` complete-readout rounds,
// by enumerating every outcome sequence with dense oracle matrices.
double enumerated_ea(int L, double beta_z, double beta_x, int rounds, int i, int j) {
    std::vector<Matrix> ops;
    for (int r = 0; r < rounds; ++r) {
        for (int b = 0; b + 1 < L; ++b) {
            ops.push_back(oracle::zz(b, b + 1, L));
        }
        for (int s = 0; s < L; ++s) {
            ops.push_back(oracle::x_site(s, L));
        }
    }
    const int per_round = 2 * L - 1;
    Matrix zz = oracle::zz(i, j, L);
    double total = 0;
    std::function<void(size_t, const qsim::Vector &)> walk = [&](size_t k, const qsim::Vector &psi) {
        if (k == ops.size()) {
            double w = psi.squaredNorm();
            if (w > 0) {
                double e = (psi.adjoint() * zz * psi)(0, 0).real() / w;
                total += w * e * e;
            }
            return;
        }
        double beta = static_cast<int>(k % per_round) < L - 1 ? beta_z : beta_x;
        for (int s : {-1, 1}) {
            walk(k + 1, oracle::kraus(ops[k], beta, s) * psi);
        }
    };
    walk(0, oracle::plus_state(L));
    return total;
}

}  // namespace

TEST(Config, Validation) {
    ProtocolConfig c;
    EXPECT_NO_THROW(validate(c));
    c.L = 1;
    EXPECT_THROW(validate(c), ContractError);
    c.L = 15;
    EXPECT_THROW(validate(c), ContractError);
    c = {};
    c.beta_z = -0.1;
    EXPECT_THROW(validate(c), ContractError);
    c = {};
    c.rounds = 0;
    EXPECT_THROW(validate(c), ContractError);
    c = {};
    c.n_trajectories = 0;
    EXPECT_THROW(validate(c), ContractError);
    c = {};
    c.observables = {{0, 6}};
    EXPECT_THROW(validate(c), ContractError);
    c.observables = {{2, 2}};
    EXPECT_THROW(validate(c), ContractError);
}

TEST(Pairs, CenterSymmetricPerDistance) {
    std::vector<SitePair> expected{{2, 3}, {1, 3}, {1, 4}, {0, 4}, {0, 5}};
    EXPECT_EQ(center_pairs(6), expected);
    EXPECT_EQ(center_pairs(2), (std::vector<SitePair>{{0, 1}}));
    EXPECT_EQ(chain_bonds(4, Boundary::Open).size(), 3u);
    EXPECT_EQ(chain_bonds(4, Boundary::Periodic).size(), 4u);
}

TEST(Trajectory, ZeroStrengthIsIdentityInEveryMode) {
    for (auto mode : {Readout::Complete, Readout::None, Readout::Partial}) {
        auto c = small_config(mode, 4, 0.0, 0.0, 5, 1);
        auto res = run_trajectory(c, 0, snapshots());
        Matrix plus = QuantumState::plus_state(4).density_matrix();
        ASSERT_EQ(res.records.size(), 6u);
        for (const auto &rec : res.records) {
            EXPECT_LT((rec.snapshot->density_matrix() - plus).norm(), 1e-12) << to_string(mode);
        }
    }
}

TEST(Trajectory, XDephasingActsTriviallyOnPlusState) {
    auto c = small_config(Readout::None, 4, 0.0, 1.3, 4, 1);
    auto res = run_trajectory(c, 0, snapshots());
    Matrix plus = QuantumState::plus_state(4).density_matrix();
    for (const auto &rec : res.records) {
        EXPECT_LT((rec.snapshot->density() - plus).norm(), 1e-12);
    }
}

TEST(Trajectory, TwoSiteCorrelationMatchesRecordedOutcome) {
    auto c = small_config(Readout::Complete, 2, 0.1, 0.0, 1, 1);
    for (uint64_t t = 0; t < 8; ++t) {
        auto res = run_trajectory(c, t);
        ASSERT_EQ(res.outcomes.zz_outcomes.size(), 1u);
        int s = res.outcomes.zz_outcomes[0][0];
        EXPECT_NEAR(res.records[1].zz[0], s * std::tanh(0.1), 1e-14);
    }
}

TEST(Trajectory, OutcomeRecordShapes) {
    auto c = small_config(Readout::Complete, 5, 0.2, 0.1, 3, 1);
    auto res = run_trajectory(c, 0);
    ASSERT_EQ(res.outcomes.zz_outcomes.size(), 3u);
    ASSERT_EQ(res.outcomes.x_outcomes.size(), 3u);
    for (int r = 0; r < 3; ++r) {
        EXPECT_EQ(res.outcomes.zz_outcomes[r].size(), 4u);
        EXPECT_EQ(res.outcomes.x_outcomes[r].size(), 5u);
    }
    c.readout = Readout::Partial;
    res = run_trajectory(c, 0);
    EXPECT_EQ(res.outcomes.zz_outcomes.size(), 3u);
    EXPECT_TRUE(res.outcomes.x_outcomes.empty());
    c.readout = Readout::None;
    res = run_trajectory(c, 0);
    EXPECT_TRUE(res.outcomes.zz_outcomes.empty());
    EXPECT_TRUE(res.outcomes.x_outcomes.empty());
}

TEST(Trajectory, RecordEvery) {
    auto c = small_config(Readout::Complete, 3, 0.2, 0.1, 7, 1);
    c.record_every = 3;
    auto res = run_trajectory(c, 0);
    ASSERT_EQ(res.records.size(), 3u);
    EXPECT_EQ(res.records[1].round, 3);
    EXPECT_EQ(res.records[2].round, 6);
    auto stats = run_ensemble(c, 1);
    EXPECT_EQ(stats.round_numbers, (std::vector<int>{0, 3, 6}));
    EXPECT_EQ(stats.record_index(6), 2);
    EXPECT_EQ(stats.record_index(5), -1);
}

TEST(Trajectory, CompleteModeStaysPure) {
    auto c = small_config(Readout::Complete, 5, 0.3, 0.2, 20, 1);
    auto res = run_trajectory(c, 3, snapshots());
    for (const auto &rec : res.records) {
        EXPECT_TRUE(rec.snapshot->is_pure());
        EXPECT_NEAR(rec.snapshot->promoted().purity(), 1.0, 1e-9);
    }
}

TEST(Trajectory, WeakSymmetryInMixedModes) {
    for (auto mode : {Readout::None, Readout::Partial}) {
        auto c = small_config(mode, 4, 0.4, 0.3, 10, 1);
        auto res = run_trajectory(c, 2, snapshots());
        Matrix parity = oracle::pauli_string("XXXX");
        for (const auto &rec : res.records) {
            ASSERT_FALSE(rec.snapshot->is_pure());
            const Matrix &rho = rec.snapshot->density();
            EXPECT_LT((parity * rho - rho * parity).cwiseAbs().maxCoeff(), 1e-9);
        }
    }
}

TEST(Ensemble, ZeroCouplingGivesZeroEa) {
    auto c = small_config(Readout::Complete, 5, 0.0, 0.2, 6, 50);
    auto stats = run_ensemble(c, 1);
    for (const auto &round : stats.zz_squared) {
        for (const auto &e : round) {
            EXPECT_NEAR(e.mean, 0.0, 1e-20);
        }
    }
}

TEST(Ensemble, StrongCouplingGivesGhzLikeEa) {
    auto c = small_config(Readout::Complete, 6, 5.0, 0.0, 3, 50);
    auto stats = run_ensemble(c, 1);
    for (const auto &e : stats.zz_squared.back()) {
        EXPECT_GT(e.mean, 1 - 1e-3);
    }
    // Same limit on three sites against exhaustive enumeration.
    EXPECT_GT(enumerated_ea(3, 5.0, 0.0, 3, 0, 2), 1 - 1e-3);
}

TEST(Ensemble, MatchesOutcomeEnumeration) {
    auto c = small_config(Readout::Complete, 3, 0.5, 0.3, 2, 4000);
    auto stats = run_ensemble(c, 2);
    for (auto [i, j] : stats.pairs) {
        double exact = enumerated_ea(3, 0.5, 0.3, 2, i, j);
        const auto &e = stats.zz_squared.back()[stats.pair_index(i, j)];
        EXPECT_NEAR(e.mean, exact, 4 * e.std_error + 1e-12) << i << "," << j;
    }
}

TEST(Ensemble, BitIdenticalAcrossWorkerCounts) {
    auto c = small_config(Readout::Partial, 4, 0.3, 0.2, 5, 24);
    auto a = run_ensemble(c, 1);
    auto b = run_ensemble(c, 3);
    auto d = run_ensemble(c, 7);
    for (size_t r = 0; r < a.zz.size(); ++r) {
        for (size_t k = 0; k < a.pairs.size(); ++k) {
            EXPECT_EQ(a.zz_squared[r][k].mean, b.zz_squared[r][k].mean);
            EXPECT_EQ(a.fidelity[r][k].mean, b.fidelity[r][k].mean);
            EXPECT_EQ(a.renyi2[r][k].std_error, d.renyi2[r][k].std_error);
        }
    }
}

TEST(Ensemble, NoneModeCollapsesWithWarning) {
    auto c = small_config(Readout::None, 3, 0.3, 0.2, 3, 10);
    auto stats = run_ensemble(c, 1);
    EXPECT_EQ(stats.n_trajectories, 1);
    ASSERT_EQ(stats.warnings.size(), 1u);
    c.n_trajectories = 1;
    EXPECT_TRUE(run_ensemble(c, 1).warnings.empty());
}

TEST(Ensemble, NoneModeIsPartialModeWithOutcomesDiscarded) {
    const int n_traj = 10000;
    auto c = small_config(Readout::Partial, 3, 0.6, 0.4, 2, 1);
    auto none_cfg = c;
    none_cfg.readout = Readout::None;
    Matrix none_rho = run_trajectory(none_cfg, 0, snapshots()).records.back().snapshot->density();

    std::vector<std::string> observables{"XII", "IXI", "XIX", "YYI", "IZZ", "XXX", "ZYY"};
    std::vector<double> sum(observables.size(), 0.0), sum_sq(observables.size(), 0.0);
    for (int t = 0; t < n_traj; ++t) {
        auto res = run_trajectory(c, t, snapshots());
        const auto &state = *res.records.back().snapshot;
        for (size_t k = 0; k < observables.size(); ++k) {
            double v = qsim::expectation_pauli(state, qsim::PauliOperator::parse(observables[k]));
            sum[k] += v;
            sum_sq[k] += v * v;
        }
    }
    for (size_t k = 0; k < observables.size(); ++k) {
        double mean = sum[k] / n_traj;
        double var = std::max(0.0, sum_sq[k] / n_traj - mean * mean);
        double se = std::sqrt(var / (n_traj - 1));
        double ref = (oracle::pauli_string(observables[k]) * none_rho).trace().real();
        EXPECT_NEAR(mean, ref, 3 * se + 1e-12) << observables[k];
    }
}

TEST(Ensemble, NoneModeMatchesDephasingOracle) {
    auto c = small_config(Readout::None, 3, 0.45, 0.25, 2, 1);
    Matrix rho = QuantumState::plus_state(3).density_matrix();
    for (int r = 0; r < 2; ++r) {
        for (int b = 0; b < 2; ++b) {
            rho = oracle::dephase(rho, oracle::zz(b, b + 1, 3), 0.45);
        }
        for (int s = 0; s < 3; ++s) {
            rho = oracle::dephase(rho, oracle::x_site(s, 3), 0.25);
        }
    }
    auto res = run_trajectory(c, 0, snapshots());
    EXPECT_LT((res.records.back().snapshot->density() - rho).norm(), 1e-12);
}

TEST(Ensemble, UntrackedLookups) {
    auto c = small_config(Readout::Complete, 4, 0.1, 0.1, 2, 2);
    c.observables = {{0, 3}, {1, 2}};
    auto stats = run_ensemble(c, 1);
    EXPECT_EQ(stats.pair_index(3, 0), 0);
    EXPECT_EQ(stats.pair_index(0, 1), -1);
}

TEST(Workers, EnvironmentOverride) {
    setenv("NML_WORKERS", "3", 1);
    EXPECT_EQ(default_workers(), 3);
    setenv("NML_WORKERS", "zero", 1);
    EXPECT_GE(default_workers(), 1);
    unsetenv("NML_WORKERS");
}
