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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nml/analytic1d.hpp"
#include "nml/correlators.hpp"
#include "nml/meanfield.hpp"
#include "nml/numerics.hpp"
#include "nml/phasescan.hpp"
#include "nml/protocols.hpp"

#ifndef NML_VERSION
#define NML_VERSION "0.0.0"
#endif

namespace nml::cli {

using nlohmann::json;

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string csv_record(const std::vector<std::string> &fields) {
    std::string line;
    for (size_t k = 0; k < fields.size(); ++k) {
        if (k > 0) {
            line += ',';
        }
        const std::string &f = fields[k];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            line += f;
        } else {
            line += '"';
            for (char c : f) {
                if (c == '"') {
                    line += '"';
                }
                line += c;
            }
            line += '"';
        }
    }
    line += "\r\n";
    return line;
}

namespace {

std::string fmt(double v) {
    return format_number(v);
}

std::string fmt(int v) {
    return std::to_string(v);
}

json number_json(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_number(v);
}

/// Records how to read back every bound option so the resolved configuration
/// can be written to the manifest and replayed.
class ParamRegistry {
   public:
    template <typename T>
    CLI::Option *option(CLI::App *app, const std::string &name, T &target, const std::string &help) {
        readers_.emplace_back(name, [&target]() { return to_json(target); });
        return app->add_option("--" + name, target, help)->capture_default_str();
    }

    CLI::Option *flag(CLI::App *app, const std::string &name, bool &target, const std::string &help) {
        readers_.emplace_back(name, [&target]() { return json(target); });
        return app->add_flag("--" + name, target, help);
    }

    json resolved() const {
        json out = json::object();
        for (const auto &[name, read] : readers_) {
            out[name] = read();
        }
        return out;
    }

   private:
    static json to_json(double v) {
        return v;
    }
    static json to_json(int v) {
        return v;
    }
    static json to_json(uint64_t v) {
        return v;
    }
    static json to_json(const std::string &v) {
        return v;
    }
    static json to_json(const std::vector<double> &v) {
        return v;
    }

    std::vector<std::pair<std::string, std::function<json()>>> readers_;
};

/// Transforms a resolved configuration back into command line tokens.
void append_config_args(const json &config, std::vector<std::string> &args) {
    for (const auto &[key, value] : config.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                args.push_back("--" + key);
            }
        } else if (value.is_array()) {
            for (const auto &v : value) {
                args.push_back("--" + key + "=" + (v.is_number_float() ? fmt(v.get<double>()) : v.dump()));
            }
        } else if (value.is_number_float()) {
            args.push_back("--" + key + "=" + fmt(value.get<double>()));
        } else if (value.is_string()) {
            args.push_back("--" + key + "=" + value.get<std::string>());
        } else {
            args.push_back("--" + key + "=" + value.dump());
        }
    }
}

bool has_flag(const std::vector<std::string> &args, const std::string &key) {
    const std::string flag = "--" + key;
    for (const auto &a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) {
            return true;
        }
    }
    return false;
}

std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Flat "key = value" (or "key value") lines, '#' comments. Keys are flag
/// names with or without leading dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ContractError("cannot read config file '" + path + "'");
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        size_t split = line.find('=');
        if (split == std::string::npos) {
            split = line.find_first_of(" \t");
        }
        if (split == std::string::npos) {
            throw ContractError(path + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, split));
        std::string value = trim(line.substr(split + 1));
        while (!key.empty() && key.front() == '-') {
            key.erase(key.begin());
        }
        if (key.empty()) {
            throw ContractError(path + ":" + std::to_string(number) + ": empty key");
        }
        out.emplace_back(key, value);
    }
    return out;
}

std::optional<std::string> find_value(const std::vector<std::string> &args, const std::string &key) {
    const std::string flag = "--" + key;
    for (size_t k = 0; k < args.size(); ++k) {
        if (args[k] == flag && k + 1 < args.size()) {
            return args[k + 1];
        }
        if (args[k].rfind(flag + "=", 0) == 0) {
            return args[k].substr(flag.size() + 1);
        }
    }
    return std::nullopt;
}

/// Splices config file entries into the argument list. Entries whose flag is
/// already present are skipped, so flags override the file.
std::vector<std::string> merge_config(const std::vector<std::string> &args) {
    auto path = find_value(args, "config");
    if (!path) {
        return args;
    }
    std::vector<std::string> merged = args;
    for (const auto &[key, value] : read_config_file(*path)) {
        if (key == "config" || has_flag(args, key)) {
            continue;
        }
        if (value == "true") {
            merged.push_back("--" + key);
        } else if (value != "false") {
            merged.push_back("--" + key + "=" + value);
        }
    }
    return merged;
}

class OutputSet {
   public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    }

    std::filesystem::path write(const std::string &name, const std::string &content) {
        std::filesystem::create_directories(dir_);
        auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw ContractError("cannot write '" + path.string() + "'");
        }
        f << content;
        if (!f) {
            throw ContractError("write failed for '" + path.string() + "'");
        }
        paths_.push_back(path.string());
        return path;
    }

    const std::vector<std::string> &paths() const {
        return paths_;
    }

   private:
    std::filesystem::path dir_;
    std::vector<std::string> paths_;
};

struct GlobalOptions {
    int workers = 0;
    std::string out_dir = ".";
    std::string config_path;
    bool dry_run = false;
};

struct SimulateOptions {
    int L = 6;
    double beta_z = 0.1;
    double beta_x = 0.0;
    std::string mode = "complete";
    std::string boundary = "open";
    int rounds = 60;
    int traj = 2000;
    uint64_t seed = 0;
    int record_every = 1;
};

struct MeanFieldOptions {
    std::string mode = "partial";
    int d = 6;
    double J = 1.0;
    double h = 0.0;
    double tf = 1.0;
    // scan axes; h_max <= 0 means 1.5 h_c
    double h_min = 0.0;
    double h_max = 0.0;
    int nh = 80;
    double tf_min = 1e-3;
    double tf_max = 10.0;
    int ntf = 80;
    bool no_refine = false;
};

struct AnalyticOptions {
    std::vector<double> jtf{0.25};
    int r_max = 5;
    double h_over_j = -1.0;
};

struct PropagatorOptions {
    int d = 6;
    double J = 1.0;
    double h = 0.0;
    double tf = 0.5;
    int R = 2;
    int samples = 101;
};

qsim::Boundary parse_boundary(const std::string &text) {
    if (text == "open") {
        return qsim::Boundary::Open;
    }
    if (text == "periodic") {
        return qsim::Boundary::Periodic;
    }
    throw ContractError("unknown boundary '" + text + "' (expected open or periodic)");
}

std::string series_csv(const protocols::EnsembleStatistics &stats, correlators::Kind kind) {
    std::string csv = csv_record({"round", "distance", "value", "stderr"});
    for (int round : stats.round_numbers) {
        auto series = correlators::make_series(stats, kind, round);
        for (const auto &p : series.points) {
            csv += csv_record({fmt(round), fmt(p.distance), fmt(p.value), fmt(p.std_error)});
        }
    }
    return csv;
}

struct FitTable {
    std::string csv;
    std::optional<correlators::LengthFit> last;
};

FitTable fits_csv(const protocols::EnsembleStatistics &stats, correlators::Kind kind, int L, qsim::Boundary boundary) {
    FitTable table;
    table.csv = csv_record({"round", "xi", "r_squared"});
    auto window = correlators::default_window(L, boundary);
    for (int round : stats.round_numbers) {
        auto series = correlators::make_series(stats, kind, round);
        try {
            auto fit = correlators::fit_correlation_length(series, window);
            table.csv += csv_record({fmt(round), fmt(fit.xi), fmt(fit.r_squared)});
            table.last = fit;
        } catch (const ContractError &) {
            // Vanishing correlators have no exponential fit.
            table.csv += csv_record({fmt(round), "nan", "nan"});
            table.last.reset();
        }
    }
    return table;
}

json point_json(Readout mode, int d, double J, const meanfield::PhasePoint &p) {
    return json{{"mode", to_string(mode)},
                {"d", d},
                {"J", J},
                {"h", p.h},
                {"t_f", p.t_f},
                {"q_s", number_json(p.q_s)},
                {"r_coeff", number_json(p.r_coeff)},
                {"label", meanfield::to_string(p.label)}};
}

}  // namespace

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{"Weak-measurement chain simulator and mean-field phase diagrams", "nml"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", NML_VERSION);

    GlobalOptions global;
    ParamRegistry global_params;
    global_params.option(&app, "workers", global.workers, "Worker threads (0: NML_WORKERS or hardware parallelism)");
    global_params.option(&app, "out-dir", global.out_dir, "Directory for CSV, JSON and manifest files");
    app.add_option("--config", global.config_path, "Flat key = value file mirroring flag names; flags win");
    app.add_flag("--dry-run", global.dry_run, "Print the resolved configuration and exit");

    // simulate
    SimulateOptions sim;
    ParamRegistry sim_params;
    auto *simulate = app.add_subcommand("simulate", "Monte Carlo trajectories of the measured chain");
    sim_params.option(simulate, "L", sim.L, "Chain length (2..14)");
    sim_params.option(simulate, "beta-z", sim.beta_z, "ZZ measurement strength");
    sim_params.option(simulate, "beta-x", sim.beta_x, "X measurement strength");
    sim_params.option(simulate, "mode", sim.mode, "Readout: complete, none or partial");
    sim_params.option(simulate, "boundary", sim.boundary, "open or periodic");
    sim_params.option(simulate, "rounds", sim.rounds, "Measurement rounds T");
    sim_params.option(simulate, "traj", sim.traj, "Trajectories");
    sim_params.option(simulate, "seed", sim.seed, "Master seed");
    sim_params.option(simulate, "record-every", sim.record_every, "Record observables every k rounds");
    simulate->footer(
        "Writes simulate_{ea,fidelity,renyi2}.csv (round,distance,value,stderr) and\n"
        "simulate_{ea,fidelity,renyi2}_fits.csv (round,xi,r_squared).");

    // meanfield
    MeanFieldOptions mf;
    auto *meanfield_cmd = app.add_subcommand("meanfield", "Mean-field phase diagram queries");
    meanfield_cmd->require_subcommand(1);
    ParamRegistry point_params, scan_params, hc_params;
    auto *mf_point = meanfield_cmd->add_subcommand("point", "Classify one (h, t_f) point");
    auto *mf_scan = meanfield_cmd->add_subcommand("scan", "Classify an (h, t_f) grid");
    auto *mf_hc = meanfield_cmd->add_subcommand("hc", "Stationary critical X rate");
    for (auto [cmd, reg] : {std::pair{mf_point, &point_params}, {mf_scan, &scan_params}, {mf_hc, &hc_params}}) {
        reg->option(cmd, "mode", mf.mode, "Readout: complete, none or partial");
        reg->option(cmd, "d", mf.d, "Spatial dimension");
        reg->option(cmd, "J", mf.J, "ZZ measurement rate");
    }
    point_params.option(mf_point, "h", mf.h, "X measurement rate");
    point_params.option(mf_point, "tf", mf.tf, "Final time");
    scan_params.option(mf_scan, "h-min", mf.h_min, "Smallest h");
    scan_params.option(mf_scan, "h-max", mf.h_max, "Largest h (0: 1.5 h_c)");
    scan_params.option(mf_scan, "nh", mf.nh, "Number of h values, linear");
    scan_params.option(mf_scan, "tf-min", mf.tf_min, "Smallest t_f");
    scan_params.option(mf_scan, "tf-max", mf.tf_max, "Largest t_f");
    scan_params.option(mf_scan, "ntf", mf.ntf, "Number of t_f values, log spaced");
    scan_params.flag(mf_scan, "no-refine", mf.no_refine, "Skip bisection of label changes");
    mf_scan->footer(
        "Writes meanfield_scan.csv (mode,d,J,h,t_f,q_s,r_coeff,label) and\n"
        "meanfield_critical.csv (mode,h,from,to,t_f_below,t_f_above,t_f).");

    // analytic
    AnalyticOptions an;
    auto *analytic = app.add_subcommand("analytic", "Closed-form chain results");
    analytic->require_subcommand(1);
    ParamRegistry xi_ea_params, xi_r2_params, r2_params, duality_params;
    auto *an_xi_ea = analytic->add_subcommand("xi-ea", "Edwards-Anderson length under ZZ measurement only");
    auto *an_xi_r2 = analytic->add_subcommand("xi-renyi2", "Renyi-2 correlation length");
    auto *an_r2 = analytic->add_subcommand("renyi2-correlator", "Renyi-2 correlator tanh(4 J t_f)^r");
    auto *an_duality = analytic->add_subcommand("duality", "Self-dual point and growth regimes");
    xi_ea_params.option(an_xi_ea, "Jtf", an.jtf, "Values of J t_f")->expected(1, -1);
    xi_r2_params.option(an_xi_r2, "Jtf", an.jtf, "Values of J t_f")->expected(1, -1);
    r2_params.option(an_r2, "Jtf", an.jtf, "Values of J t_f")->expected(1, -1);
    r2_params.option(an_r2, "r-max", an.r_max, "Largest distance");
    duality_params.option(an_duality, "h-over-j", an.h_over_j, "Report the regime at this h/J (negative: all)");
    an_xi_ea->footer("CSV columns: Jtf,xi,underflow,asymptotic");
    an_xi_r2->footer("CSV columns: Jtf,xi");
    an_r2->footer("CSV columns: Jtf,r,value");

    // propagator
    PropagatorOptions pr;
    auto *propagator = app.add_subcommand("propagator", "Temporal coupling curves over [0, t_f]");
    propagator->require_subcommand(1);
    ParamRegistry dz_params, dr_params, dk_params;
    auto *pr_dz = propagator->add_subcommand("dz", "Partial readout coupling");
    auto *pr_dr = propagator->add_subcommand("dr", "R-replica coupling");
    auto *pr_dk = propagator->add_subcommand("dk", "Complete readout coupling at the saddle");
    for (auto [cmd, reg] : {std::pair{pr_dz, &dz_params}, {pr_dr, &dr_params}, {pr_dk, &dk_params}}) {
        reg->option(cmd, "h", pr.h, "X measurement rate");
        reg->option(cmd, "tf", pr.tf, "Final time");
        reg->option(cmd, "samples", pr.samples, "Evenly spaced lags including both ends");
        cmd->footer("CSV columns: dt,value,reflection_residual");
    }
    dr_params.option(pr_dr, "R", pr.R, "Replica count");
    dk_params.option(pr_dk, "d", pr.d, "Spatial dimension");
    dk_params.option(pr_dk, "J", pr.J, "ZZ measurement rate");

    // replay
    std::string manifest_path;
    auto *replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest JSON")->required();

    std::vector<std::string> args;
    try {
        args = merge_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &e) {
        out << NML_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ContractError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (*replay) {
        try {
            std::ifstream f(manifest_path);
            if (!f) {
                throw ContractError("cannot read manifest '" + manifest_path + "'");
            }
            json m = json::parse(f);
            std::vector<std::string> again;
            std::istringstream words(m.at("command").get<std::string>());
            for (std::string w; words >> w;) {
                again.push_back(w);
            }
            append_config_args(m.at("config"), again);
            json g = m.at("global");
            if (!has_flag(args, "out-dir")) {
                again.push_back("--out-dir=" + g.at("out-dir").get<std::string>());
            } else {
                again.push_back("--out-dir=" + *find_value(args, "out-dir"));
            }
            if (has_flag(args, "workers")) {
                again.push_back("--workers=" + *find_value(args, "workers"));
            }
            if (global.dry_run) {
                again.push_back("--dry-run");
            }
            return run(again, out, err);
        } catch (const json::exception &e) {
            err << "error: malformed manifest: " << e.what() << "\n";
            return kExitConfig;
        } catch (const ContractError &e) {
            err << "error: " << e.what() << "\n";
            return kExitConfig;
        }
    }

    // Selected command and its parameters.
    std::string command;
    const ParamRegistry *params = nullptr;
    const std::vector<std::pair<CLI::App *, const ParamRegistry *>> leaves = {
        {simulate, &sim_params},   {mf_point, &point_params}, {mf_scan, &scan_params}, {mf_hc, &hc_params},
        {an_xi_ea, &xi_ea_params}, {an_xi_r2, &xi_r2_params}, {an_r2, &r2_params},     {an_duality, &duality_params},
        {pr_dz, &dz_params},       {pr_dr, &dr_params},       {pr_dk, &dk_params}};
    for (auto [cmd, reg] : leaves) {
        if (cmd->parsed()) {
            command =
                cmd->get_parent() == &app ? cmd->get_name() : cmd->get_parent()->get_name() + " " + cmd->get_name();
            params = reg;
        }
    }
    json config = params->resolved();
    json global_config = global_params.resolved();
    if (global.dry_run) {
        out << json{{"command", command}, {"global", global_config}, {"config", config}}.dump(2) << "\n";
        return kExitOk;
    }

    OutputSet outputs(global.out_dir);
    json extra = json::object();
    std::vector<std::string> warnings;
    auto prefix = command;
    std::replace(prefix.begin(), prefix.end(), ' ', '_');
    std::replace(prefix.begin(), prefix.end(), '-', '_');

    try {
        if (*simulate) {
            protocols::ProtocolConfig cfg;
            cfg.L = sim.L;
            cfg.beta_z = sim.beta_z;
            cfg.beta_x = sim.beta_x;
            cfg.readout = parse_readout(sim.mode);
            cfg.boundary = parse_boundary(sim.boundary);
            cfg.rounds = sim.rounds;
            cfg.n_trajectories = sim.traj;
            cfg.master_seed = sim.seed;
            cfg.record_every = sim.record_every;
            auto stats = protocols::run_ensemble(cfg, global.workers);
            warnings = stats.warnings;
            using correlators::Kind;
            for (Kind kind : {Kind::EA, Kind::Fidelity, Kind::Renyi2}) {
                std::string name = correlators::to_string(kind);
                outputs.write("simulate_" + name + ".csv", series_csv(stats, kind));
                auto fits = fits_csv(stats, kind, cfg.L, cfg.boundary);
                outputs.write("simulate_" + name + "_fits.csv", fits.csv);
                out << name << " xi(T=" << stats.round_numbers.back()
                    << ") = " << (fits.last ? fmt(fits.last->xi) : std::string("nan")) << "\n";
            }
            extra["n_trajectories_used"] = stats.n_trajectories;
        } else if (*mf_point) {
            Readout mode = parse_readout(mf.mode);
            auto p = meanfield::classify_point(mode, mf.d, mf.J, mf.h, mf.tf);
            json j = point_json(mode, mf.d, mf.J, p);
            outputs.write("meanfield_point.json", j.dump(2) + "\n");
            out << j.dump(2) << "\n";
        } else if (*mf_scan) {
            Readout mode = parse_readout(mf.mode);
            if (mf.nh < 1 || mf.ntf < 2) {
                throw ContractError("scan needs nh >= 1 and ntf >= 2");
            }
            if (!(mf.tf_min > 0) || !(mf.tf_max > mf.tf_min)) {
                throw ContractError("scan needs 0 < tf-min < tf-max");
            }
            phasescan::ScanGrid grid;
            grid.mode = mode;
            grid.d = mf.d;
            grid.J = mf.J;
            double h_max = mf.h_max;
            if (h_max <= 0) {
                h_max = 1.5 * (mode == Readout::Complete ? meanfield::complete_stationary_hc(mf.d, mf.J)
                                                         : meanfield::partial_stationary_hc(mf.d, mf.J));
            }
            for (int i = 0; i < mf.nh; ++i) {
                grid.h_values.push_back(mf.nh == 1 ? mf.h_min : mf.h_min + (h_max - mf.h_min) * i / (mf.nh - 1));
            }
            for (int k = 0; k < mf.ntf; ++k) {
                grid.tf_values.push_back(
                    std::exp(std::log(mf.tf_min) + (std::log(mf.tf_max) - std::log(mf.tf_min)) * k / (mf.ntf - 1)));
            }
            grid.tf_values.front() = mf.tf_min;
            grid.tf_values.back() = mf.tf_max;
            phasescan::ScanOptions opts;
            opts.workers = global.workers;
            opts.refine = !mf.no_refine;
            auto result = phasescan::scan(grid, opts);
            std::string cells = csv_record({"mode", "d", "J", "h", "t_f", "q_s", "r_coeff", "label"});
            for (const auto &p : result.cells) {
                cells += csv_record({mf.mode, fmt(mf.d), fmt(mf.J), fmt(p.h), fmt(p.t_f), fmt(p.q_s), fmt(p.r_coeff),
                                     meanfield::to_string(p.label)});
            }
            outputs.write("meanfield_scan.csv", cells);
            std::string lines = csv_record({"mode", "h", "from", "to", "t_f_below", "t_f_above", "t_f"});
            out << csv_record({"h", "critical_t_f"});
            for (size_t i = 0; i < grid.h_values.size(); ++i) {
                for (const auto &t : result.transitions[i]) {
                    lines +=
                        csv_record({mf.mode, fmt(grid.h_values[i]), meanfield::to_string(t.from),
                                    meanfield::to_string(t.to), fmt(t.tf_below), fmt(t.tf_above), fmt(t.tf_refined)});
                }
                auto c = result.critical_tf(i);
                out << csv_record({fmt(grid.h_values[i]), c ? fmt(*c) : std::string("none")});
            }
            outputs.write("meanfield_critical.csv", lines);
        } else if (*mf_hc) {
            Readout mode = parse_readout(mf.mode);
            json j{{"mode", mf.mode}, {"d", mf.d}, {"J", mf.J}};
            switch (mode) {
                case Readout::Complete:
                    j["h_c"] = meanfield::complete_stationary_hc(mf.d, mf.J);
                    break;
                case Readout::Partial:
                    j["h_c"] = meanfield::partial_stationary_hc(mf.d, mf.J);
                    break;
                case Readout::None:
                    throw ContractError("readout=none has no critical X rate; its transition sits at t_c for all h");
            }
            j["h_c_over_dJ"] = j["h_c"].get<double>() / (mf.d * mf.J);
            j["t_c"] = meanfield::swssb_critical_time(mf.d, mf.J);
            outputs.write("meanfield_hc.json", j.dump(2) + "\n");
            out << j.dump(2) << "\n";
        } else if (*an_xi_ea) {
            std::string csv = csv_record({"Jtf", "xi", "underflow", "asymptotic"});
            for (double jt : an.jtf) {
                auto r = analytic1d::xi_ea_zz_only(jt);
                csv += csv_record(
                    {fmt(jt), fmt(r.xi), r.underflow ? "true" : "false", fmt(analytic1d::xi_ea_asymptotic(jt))});
            }
            outputs.write("analytic_xi_ea.csv", csv);
            out << csv;
        } else if (*an_xi_r2) {
            std::string csv = csv_record({"Jtf", "xi"});
            for (double jt : an.jtf) {
                csv += csv_record({fmt(jt), fmt(analytic1d::xi_renyi2(jt))});
            }
            outputs.write("analytic_xi_renyi2.csv", csv);
            out << csv;
        } else if (*an_r2) {
            if (an.r_max < 0) {
                throw ContractError("r-max must be nonnegative");
            }
            std::string csv = csv_record({"Jtf", "r", "value"});
            for (double jt : an.jtf) {
                for (int r = 0; r <= an.r_max; ++r) {
                    csv += csv_record({fmt(jt), fmt(r), fmt(analytic1d::renyi2_correlator_closed(r, jt))});
                }
            }
            outputs.write("analytic_renyi2_correlator.csv", csv);
            out << csv;
        } else if (*an_duality) {
            using analytic1d::Regime;
            json j{{"h_over_J_c", analytic1d::duality_critical_point()},
                   {"regimes",
                    {{"h/J < 1", to_string(Regime::ExponentialGrowth)},
                     {"h/J = 1", to_string(Regime::LinearGrowth)},
                     {"h/J > 1", to_string(Regime::Saturating)}}}};
            if (an.h_over_j >= 0) {
                j["h_over_J"] = an.h_over_j;
                j["regime"] = to_string(analytic1d::regime(an.h_over_j));
            }
            outputs.write("analytic_duality.json", j.dump(2) + "\n");
            out << j.dump(2) << "\n";
        } else {
            phasescan::PropagatorKind kind = *pr_dz   ? phasescan::PropagatorKind::DZ
                                             : *pr_dr ? phasescan::PropagatorKind::DR
                                                      : phasescan::PropagatorKind::DK;
            phasescan::PropagatorParams p;
            p.d = pr.d;
            p.J = pr.J;
            p.h = pr.h;
            p.t_f = pr.tf;
            p.R = pr.R;
            auto curve = phasescan::propagator_curve(kind, p, phasescan::uniform_lags(pr.tf, pr.samples));
            std::string csv = csv_record({"dt", "value", "reflection_residual"});
            for (const auto &s : curve) {
                csv += csv_record({fmt(s.dt), fmt(s.value), fmt(s.reflection_residual)});
            }
            outputs.write("propagator_" + phasescan::to_string(kind) + ".csv", csv);
            out << csv;
        }
    } catch (const ContractError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError &e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"command", command},
                  {"global", global_config},
                  {"config", config},
                  {"seed", config.contains("seed") ? config["seed"] : json(nullptr)},
                  {"code_version", NML_VERSION},
                  {"wall_time_seconds", wall},
                  {"outputs", outputs.paths()},
                  {"warnings", warnings}};
    for (auto &[k, v] : extra.items()) {
        manifest[k] = v;
    }
    try {
        auto path = outputs.write(prefix + "_manifest.json", manifest.dump(2) + "\n");
        err << "manifest: " << path.string() << "\n";
    } catch (const ContractError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    for (const auto &w : warnings) {
        err << "warning: " << w << "\n";
    }
    return kExitOk;
}

}  // namespace nml::cli
