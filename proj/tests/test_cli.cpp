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

#include "nml/cli.hpp"

#include <unistd.h>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;
using nml::cli::csv_record;
using nml::cli::format_number;
using nml::cli::run;

namespace {

class ScratchDir {
   public:
    ScratchDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("nml_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir &) = delete;
    ScratchDir &operator=(const ScratchDir &) = delete;

    std::string str() const {
        return path_.string();
    }
    fs::path operator/(const std::string &name) const {
        return path_ / name;
    }

   private:
    fs::path path_;
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows of a CRLF CSV, header removed.
std::vector<std::vector<std::string>> rows(const fs::path &p) {
    std::istringstream in(slurp(p));
    std::vector<std::vector<std::string>> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) {
            fields.push_back(f);
        }
        out.push_back(fields);
    }
    return out;
}

std::string json_field(const std::string &text, const std::string &key) {
    auto pos = text.find("\"" + key + "\":");
    if (pos == std::string::npos) {
        return {};
    }
    pos = text.find(':', pos) + 1;
    while (text[pos] == ' ') {
        ++pos;
    }
    auto end = text.find_first_of(",\n}", pos);
    std::string v = text.substr(pos, end - pos);
    if (!v.empty() && v.front() == '"') {
        v = v.substr(1, v.size() - 2);
    }
    return v;
}

}  // namespace

TEST(FormatNumber, SeventeenSignificantDigits) {
    EXPECT_EQ(format_number(0.25), "0.25");
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(format_number(M_PI)), M_PI);
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(CsvRecord, QuotesAndCrlf) {
    EXPECT_EQ(csv_record({"a", "b"}), "a,b\r\n");
    EXPECT_EQ(csv_record({"x,y", "say \"hi\""}), "\"x,y\",\"say \"\"hi\"\"\"\r\n");
    EXPECT_EQ(csv_record({"two\nlines"}), "\"two\nlines\"\r\n");
}

TEST(Cli, AnalyticRenyi2Length) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "analytic", "xi-renyi2", "--Jtf", "0.25"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto data = rows(dir / "analytic_xi_renyi2.csv");
    ASSERT_EQ(data.size(), 1u);
    EXPECT_NEAR(std::stod(data[0][1]), 3.672, 1e-3);
    EXPECT_TRUE(fs::exists(dir / "analytic_xi_renyi2_manifest.json"));
}

TEST(Cli, AnalyticEaLengthSeveralValues) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "analytic", "xi-ea", "--Jtf", "0.1", "0.25"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto data = rows(dir / "analytic_xi_ea.csv");
    ASSERT_EQ(data.size(), 2u);
    EXPECT_NEAR(std::stod(data[0][1]), 1.36726422203733860, 1e-9);
    EXPECT_NEAR(std::stod(data[1][1]), 3.80679733959008685, 1e-9);
}

TEST(Cli, MeanfieldPointIsLongRange) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "meanfield", "point", "--mode", "partial", "--h", "10", "--tf", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto text = slurp(dir / "meanfield_point.json");
    EXPECT_EQ(json_field(text, "label"), "LRE");
    EXPECT_GT(std::stod(json_field(text, "q_s")), 0.99);
    EXPECT_LT(std::stod(json_field(text, "r_coeff")), 0.0);
}

TEST(Cli, MeanfieldCriticalRateComplete) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "meanfield", "hc", "--mode", "complete", "--d", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto text = slurp(dir / "meanfield_hc.json");
    EXPECT_NEAR(std::stod(json_field(text, "h_c")), 8.4935, 1e-3);
}

TEST(Cli, MeanfieldNoneCriticalHasNoHc) {
    auto r = invoke({"--out-dir", fs::temp_directory_path().string(), "meanfield", "hc", "--mode", "none"});
    EXPECT_EQ(r.code, nml::cli::kExitConfig);
}

TEST(Cli, NoneScanCriticalLineAtTc) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "meanfield", "scan", "--mode", "none", "--nh", "3", "--ntf", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto crit = rows(dir / "meanfield_critical.csv");
    ASSERT_EQ(crit.size(), 3u);
    for (const auto &row : crit) {
        EXPECT_NEAR(std::stod(row[6]), 1.0 / 24, 1e-4);
    }
    EXPECT_EQ(rows(dir / "meanfield_scan.csv").size(), 15u);
}

TEST(Cli, PropagatorDzFlatWithoutXRate) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "propagator", "dz", "--h", "0", "--tf", "0.5", "--samples", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto data = rows(dir / "propagator_dz.csv");
    ASSERT_EQ(data.size(), 5u);
    for (const auto &row : data) {
        EXPECT_DOUBLE_EQ(std::stod(row[1]), 1.0);
    }
}

TEST(Cli, PropagatorDkSymmetric) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "propagator", "dk", "--h", "5", "--tf", "1", "--samples", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto data = rows(dir / "propagator_dk.csv");
    ASSERT_EQ(data.size(), 9u);
    for (size_t i = 0; i < data.size(); ++i) {
        double a = std::stod(data[i][1]);
        double b = std::stod(data[data.size() - 1 - i][1]);
        EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
        EXPECT_LT(std::stod(data[i][2]), 1e-12);
    }
}

TEST(Cli, SimulateWithoutZzMeasurementHasNoOrder) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "simulate", "--L", "4", "--beta-z", "0", "--beta-x", "0.3", "--rounds",
                     "3", "--traj", "8", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto &row : rows(dir / "simulate_ea.csv")) {
        EXPECT_NEAR(std::stod(row[2]), 0.0, 1e-20);
    }
    for (std::string name : {"simulate_fidelity.csv", "simulate_renyi2.csv", "simulate_ea_fits.csv",
                             "simulate_fidelity_fits.csv", "simulate_renyi2_fits.csv", "simulate_manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    }
}

TEST(Cli, SimulateIndependentOfWorkers) {
    ScratchDir one, three;
    std::vector<std::string> cmd = {"simulate", "--L",    "5",  "--beta-z", "0.4", "--beta-x", "0.2",    "--rounds",
                                    "4",        "--traj", "12", "--seed",   "11",  "--mode",   "partial"};
    auto a = cmd, b = cmd;
    a.insert(a.begin(), {"--workers", "1", "--out-dir", one.str()});
    b.insert(b.begin(), {"--workers", "3", "--out-dir", three.str()});
    ASSERT_EQ(invoke(a).code, 0);
    ASSERT_EQ(invoke(b).code, 0);
    for (std::string name : {"simulate_ea.csv", "simulate_fidelity.csv", "simulate_renyi2.csv"}) {
        EXPECT_EQ(slurp(one / name), slurp(three / name)) << name;
    }
}

TEST(Cli, ManifestReplayReproducesOutputs) {
    ScratchDir dir;
    auto r = invoke({"--out-dir", dir.str(), "simulate", "--L", "4", "--beta-z", "0.5", "--beta-x", "0.1", "--rounds",
                     "3", "--traj", "6", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto manifest = dir / "simulate_manifest.json";
    auto text = slurp(manifest);
    EXPECT_EQ(json_field(text, "command"), "simulate");
    EXPECT_EQ(json_field(text, "seed"), "3");
    EXPECT_FALSE(json_field(text, "code_version").empty());
    EXPECT_FALSE(json_field(text, "wall_time_seconds").empty());
    auto before = slurp(dir / "simulate_ea.csv");
    fs::remove(dir / "simulate_ea.csv");
    auto again = invoke({"replay", manifest.string()});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(slurp(dir / "simulate_ea.csv"), before);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    ScratchDir dir;
    auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "# point query\nmode = partial\nh = 3\ntf = 2\n";
    auto r = invoke({"--config", cfg.string(), "--dry-run", "meanfield", "point", "--h", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json_field(r.out, "h"), "7.0");
    EXPECT_EQ(json_field(r.out, "tf"), "2.0");
    EXPECT_EQ(json_field(r.out, "mode"), "partial");
}

TEST(Cli, DryRunWritesNothing) {
    ScratchDir dir;
    auto r = invoke({"--dry-run", "--out-dir", dir.str(), "analytic", "xi-renyi2", "--Jtf", "0.25"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::is_empty(dir.str()));
}

TEST(Cli, BadInputExitsWithConfigCode) {
    auto bad = [](std::vector<std::string> args) { return invoke(std::move(args)).code; };
    EXPECT_EQ(bad({"meanfield", "point", "--mode", "partial", "--h", "-1", "--tf", "1"}), nml::cli::kExitConfig);
    EXPECT_EQ(bad({"simulate", "--L", "20"}), nml::cli::kExitConfig);
    EXPECT_EQ(bad({"simulate", "--mode", "sideways"}), nml::cli::kExitConfig);
    EXPECT_EQ(bad({"frobnicate"}), nml::cli::kExitConfig);
    EXPECT_EQ(bad({"replay", "/nonexistent/manifest.json"}), nml::cli::kExitConfig);
}

TEST(Cli, HelpAndVersion) {
    auto h = invoke({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("simulate"), std::string::npos);
    auto v = invoke({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("1.0.0"), std::string::npos);
}
