// SPDX-License-Identifier: Apache-2.0
//
// lensdoa - lens-assisted atomic-receiver simulation and multi-user
// angle-of-arrival recovery
// Copyright (C) 2026 lensdoa contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lensdoa/csv.hpp"
#include "lensdoa/harness.hpp"

namespace {

constexpr const char* kVersion = "lensdoa 0.1.0";

using lensdoa::ExperimentConfig;

ExperimentConfig resolve_config(const std::string& config_path,
                                std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = config_path.empty() ? lensdoa::default_config()
                                               : lensdoa::load_config(config_path);
    if (seed)
        cfg.master_seed = *seed;
    cfg.validate();
    return cfg;
}

lensdoa::PowerDictionary resolve_dictionary(const ExperimentConfig& cfg,
                                            const std::string& dict_path) {
    const lensdoa::AoaGrid grid = cfg.make_grid();
    const std::uint64_t hash = lensdoa::spec_hash(cfg.lens, cfg.array, cfg.dipole, grid);
    if (!dict_path.empty())
        return lensdoa::load_dictionary(dict_path, hash);
    return lensdoa::build_dictionary(grid, cfg.lens, cfg.array, cfg.dipole);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open output file " + path);
    os << content;
}

void write_metadata_sidecar(const std::string& csv_path, const ExperimentConfig& cfg,
                            const std::string& command) {
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["master_seed"] = cfg.master_seed;
    meta["config"] = lensdoa::config_to_string(cfg);
    write_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

std::string angles_to_string(const Eigen::VectorXd& v) {
    std::ostringstream os;
    for (int i = 0; i < v.size(); ++i)
        os << (i > 0 ? ", " : "") << lensdoa::format_double(v[i] * 180.0 / M_PI);
    return os.str();
}

void print_outcome(const char* name, const lensdoa::SolverOutcome& out) {
    double sum = 0.0;
    for (double e : out.squared_errors)
        sum += e;
    const double rmse = std::sqrt(sum / double(out.squared_errors.size()));
    std::cout << name << ": angles_deg = [" << angles_to_string(out.angles) << "]"
              << "  rmse_rad = " << lensdoa::format_double(rmse)
              << "  wall_ms = " << lensdoa::format_double(out.wall_ms)
              << (out.detection_failure ? "  [detection failure]" : "")
              << (out.converged ? "" : "  [iteration limit]") << "\n";
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(std::stod(item));
    if (out.empty())
        throw std::runtime_error("no values given");
    return out;
}

Eigen::VectorXd parse_angles_deg(const std::string& csv) {
    const std::vector<double> deg = parse_values(csv);
    Eigen::VectorXd rad(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i)
        rad[i] = deg[i] * M_PI / 180.0;
    return rad;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lens-assisted atomic-receiver AoA estimation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, dict_path, out_path, axis_name, values_csv, angles_csv,
        solver_name, cells_csv = "16,32,64,128,256";
    std::optional<std::uint64_t> seed;
    int trials = -1;

    auto* build = app.add_subcommand("build-dict", "Build the power-profile dictionary "
                                                   "and write it to a cache file");
    build->add_option("--config", config_path, "config file");
    build->add_option("--out", out_path, "output cache file")->required();

    auto* simulate =
        app.add_subcommand("simulate", "Run one Monte-Carlo trial and print the record");
    simulate->add_option("--config", config_path, "config file");
    simulate->add_option("--seed", seed, "trial seed (also the echoed master seed)");
    simulate->add_option("--dict", dict_path, "dictionary cache file");
    simulate->add_option("--angles", angles_csv, "fixed true angles in degrees");

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo RMSE sweep over one axis");
    sweep_cmd->add_option("--config", config_path, "config file");
    sweep_cmd->add_option("--axis", axis_name, "snr | users | cells | aoa (aoa in degrees)")
        ->required();
    sweep_cmd->add_option("--values", values_csv, "comma-separated axis values")->required();
    sweep_cmd->add_option("--trials", trials, "trials per axis value");
    sweep_cmd->add_option("--seed", seed, "master seed override");
    sweep_cmd->add_option("--out", out_path, "output CSV")->required();

    auto* bench = app.add_subcommand("bench", "Solver runtime vs array size");
    bench->add_option("--config", config_path, "config file");
    bench->add_option("--cells", cells_csv, "comma-separated cell counts");
    bench->add_option("--seed", seed, "master seed override");
    bench->add_option("--out", out_path, "output CSV")->required();

    auto* traces = app.add_subcommand("traces", "Export solver convergence traces");
    traces->add_option("--config", config_path, "config file");
    traces->add_option("--solver", solver_name, "nnlasso | sic")->required();
    traces->add_option("--seed", seed, "trial seed");
    traces->add_option("--angles", angles_csv, "fixed true angles in degrees");
    traces->add_option("--dict", dict_path, "dictionary cache file");
    traces->add_option("--out", out_path, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, seed);
            const lensdoa::AoaGrid grid = cfg.make_grid();
            const auto dict =
                lensdoa::build_dictionary(grid, cfg.lens, cfg.array, cfg.dipole);
            const std::uint64_t hash =
                lensdoa::spec_hash(cfg.lens, cfg.array, cfg.dipole, grid);
            lensdoa::save_dictionary(dict, out_path, hash);
            std::cout << "wrote " << dict.num_cells() << "x" << dict.num_atoms()
                      << " dictionary to " << out_path << " (hash "
                      << lensdoa::format_u64(hash) << ")\n";
        } else if (simulate->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, seed);
            if (!angles_csv.empty())
                cfg.fixed_angles = parse_angles_deg(angles_csv);
            const auto dict = resolve_dictionary(cfg, dict_path);
            const auto record = lensdoa::run_trial(cfg, dict, cfg.master_seed);
            std::cout << "seed = " << lensdoa::format_u64(cfg.master_seed) << "\n"
                      << "true angles_deg = [" << angles_to_string(record.true_angles)
                      << "]\n"
                      << "sigma_q2 = " << lensdoa::format_double(record.sigma_q2) << "\n";
            if (record.nnlasso)
                print_outcome("nnlasso", *record.nnlasso);
            if (record.sic)
                print_outcome("sic", *record.sic);
        } else if (sweep_cmd->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, seed);
            if (trials > 0)
                cfg.num_trials = trials;
            const auto axis = lensdoa::parse_sweep_axis(axis_name);
            std::vector<double> values = parse_values(values_csv);
            if (axis == lensdoa::SweepAxis::aoa)
                for (double& v : values)
                    v *= M_PI / 180.0;
            const auto result = lensdoa::sweep(cfg, axis, values, true);
            write_file(out_path, lensdoa::sweep_csv(result.rows));
            write_metadata_sidecar(out_path, cfg,
                                   "sweep --axis " + axis_name + " --values " + values_csv);
            std::cout << "wrote " << result.rows.size() << " rows to " << out_path << "\n";
        } else if (bench->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, seed);
            const std::vector<double> raw = parse_values(cells_csv);
            std::vector<int> cells(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i)
                cells[i] = static_cast<int>(std::llround(raw[i]));
            const auto rows = lensdoa::runtime_bench(cfg, cells, 20, true);
            write_file(out_path, lensdoa::bench_csv(rows));
            write_metadata_sidecar(out_path, cfg, "bench --cells " + cells_csv);
            std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
        } else if (traces->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, seed);
            if (!angles_csv.empty())
                cfg.fixed_angles = parse_angles_deg(angles_csv);
            const auto dict = resolve_dictionary(cfg, dict_path);

            const std::uint64_t trial_seed = cfg.master_seed;
            const lensdoa::UserConfig users = lensdoa::draw_scenario(cfg, trial_seed);
            lensdoa::LoConfig lo;
            lo.power = cfg.lo_power_factor * users.powers.sum();
            lo.angle = cfg.lo_angle;
            const auto ctx = lensdoa::make_scenario_context(users, lo, cfg.lens, cfg.array,
                                                            cfg.dipole);
            const double sigma_q2 =
                lensdoa::calibrate_noise(ctx, std::pow(10.0, cfg.snr_db / 10.0));
            const auto batch = lensdoa::simulate_batch(
                ctx, cfg.num_snapshots, sigma_q2, lensdoa::trial_batch_seed(trial_seed),
                true);
            const Eigen::VectorXd y_perp = lensdoa::center(batch.y_bar);

            std::ostringstream os;
            if (solver_name == "nnlasso") {
                const auto res =
                    lensdoa::nnlasso_solve(dict, y_perp, users.count(), cfg.fista);
                os << "iteration,objective,model_error\n";
                for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
                    os << i << ',' << lensdoa::format_double(res.objective_trace[i]) << ','
                       << lensdoa::format_double(res.model_error_trace[i]) << '\n';
            } else if (solver_name == "sic") {
                const auto res = lensdoa::sic_solve(dict, y_perp, users.count());
                os << "stage,residual_energy\n";
                for (std::size_t i = 0; i < res.residual_energy_trace.size(); ++i)
                    os << i << ',' << lensdoa::format_double(res.residual_energy_trace[i])
                       << '\n';
            } else {
                throw std::runtime_error("traces: --solver must be nnlasso or sic");
            }
            write_file(out_path, os.str());
            write_metadata_sidecar(out_path, cfg, "traces --solver " + solver_name);
            std::cout << "wrote traces to " << out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
