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

#include "lensdoa/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lensdoa/csv.hpp"

namespace lensdoa {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s
constexpr double kElementaryCharge = 1.602e-19;
constexpr double kBohrRadius = 5.292e-11;

double deg2rad(double d) { return d * M_PI / 180.0; }
double rad2deg(double r) { return r * 180.0 / M_PI; }

} // namespace

SolverChoice parse_solver_choice(const std::string& s) {
    if (s == "nnlasso")
        return SolverChoice::nnlasso;
    if (s == "sic")
        return SolverChoice::sic;
    if (s == "both")
        return SolverChoice::both;
    throw std::invalid_argument("unknown solver '" + s + "' (nnlasso|sic|both)");
}

std::string to_string(SolverChoice c) {
    switch (c) {
    case SolverChoice::nnlasso:
        return "nnlasso";
    case SolverChoice::sic:
        return "sic";
    default:
        return "both";
    }
}

void ExperimentConfig::validate() const {
    lens.validate();
    array.validate(lens);
    dipole.validate();
    if (num_users < 1)
        throw std::invalid_argument("config: users must be >= 1");
    if (num_snapshots < 1)
        throw std::invalid_argument("config: snapshots must be >= 1");
    if (num_trials < 1)
        throw std::invalid_argument("config: trials must be >= 1");
    if (!(aoa_min < aoa_max))
        throw std::invalid_argument("config: empty AoA range");
    if (aoa_min < grid_min - 1e-12 || aoa_max > grid_max + 1e-12)
        throw std::invalid_argument("config: AoA range must lie inside the grid range");
    if (!(lo_power_factor >= 0.0))
        throw std::invalid_argument("config: lo_power_factor must be >= 0");
    fista.validate();
    make_grid();
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    const double lambda = kSpeedOfLight / 5e9;

    cfg.lens.wavelength = lambda;
    cfg.lens.aperture_width = 40.0 * lambda;
    cfg.lens.focal_length = 52.0 * lambda;
    cfg.lens.sample_spacing = lambda / 8.0;
    cfg.lens.step = lambda;
    cfg.lens.pad_factor = 8;

    cfg.array.num_cells = 64;
    cfg.array.spacing = lambda / 2.0;

    cfg.dipole.mu_eg = Eigen::Vector3d(0.0, 1785.916 * kElementaryCharge * kBohrRadius, 0.0);
    cfg.dipole.lambda_c = 1.0;
    cfg.dipole.lambda_p = 1.0;
    cfg.dipole.hbar_scale = 1.0;

    cfg.grid_min = deg2rad(-15.0);
    cfg.grid_max = deg2rad(15.0);
    cfg.grid_spacing = deg2rad(0.1);

    cfg.num_users = 3;
    cfg.num_snapshots = 1024;
    cfg.snr_db = 5.0;
    cfg.aoa_min = -M_PI / 12.0;
    cfg.aoa_max = M_PI / 12.0;
    cfg.num_trials = 1000;
    cfg.master_seed = 12345;
    cfg.solver = SolverChoice::both;

    // LO at the total user power level: large enough that the centered
    // pipeline has a real floor to remove, small enough that its fluctuation
    // noise does not bury the shot-noise axis the experiments sweep.
    cfg.lo_power_factor = 1.0;
    cfg.lo_angle = 0.0;
    cfg.min_separation = true;
    // Sources inside one aperture resolution cell (lambda / W radians) are
    // unresolvable for any estimator of this model; draws keep them apart.
    cfg.min_sep_rad = cfg.lens.wavelength / cfg.lens.aperture_width;
    cfg.block_fading = false;
    return cfg;
}

namespace {

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

using Sections = std::map<std::string, std::map<std::string, KeyValue>>;

Sections parse_sections(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file " + path);
    Sections sections;
    std::string section = "";
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos)
            line.erase(comment);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        sections[section][key] = {value, lineno, false};
    }
    return sections;
}

class Reader {
  public:
    Reader(Sections sections, std::string path)
        : sections_(std::move(sections)), path_(std::move(path)) {}

    void read(const std::string& section, const std::string& key,
              const std::function<void(const std::string&)>& apply) {
        auto sec = sections_.find(section);
        if (sec == sections_.end())
            return;
        auto kv = sec->second.find(key);
        if (kv == sec->second.end())
            return;
        kv->second.used = true;
        try {
            apply(kv->second.value);
        } catch (const std::exception& e) {
            throw std::runtime_error(path_ + ":" + std::to_string(kv->second.line) + ": " +
                                     section + "." + key + ": " + e.what());
        }
    }

    void read_double(const std::string& s, const std::string& k, double& out) {
        read(s, k, [&](const std::string& v) { out = std::stod(v); });
    }
    void read_int(const std::string& s, const std::string& k, int& out) {
        read(s, k, [&](const std::string& v) { out = std::stoi(v); });
    }
    void read_u64(const std::string& s, const std::string& k, std::uint64_t& out) {
        read(s, k, [&](const std::string& v) { out = std::stoull(v); });
    }
    void read_bool(const std::string& s, const std::string& k, bool& out) {
        read(s, k, [&](const std::string& v) {
            if (v == "true" || v == "1" || v == "on" || v == "yes")
                out = true;
            else if (v == "false" || v == "0" || v == "off" || v == "no")
                out = false;
            else
                throw std::invalid_argument("expected a boolean");
        });
    }
    void read_deg(const std::string& s, const std::string& k, double& out_rad) {
        read(s, k, [&](const std::string& v) { out_rad = deg2rad(std::stod(v)); });
    }

    void reject_unknown() const {
        for (const auto& [sec, kvs] : sections_)
            for (const auto& [key, kv] : kvs)
                if (!kv.used)
                    throw std::runtime_error(path_ + ":" + std::to_string(kv.line) +
                                             ": unknown key " + sec + "." + key);
    }

  private:
    Sections sections_;
    std::string path_;
};

} // namespace

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg = default_config();
    Reader r(parse_sections(path), path);

    r.read_double("lens", "wavelength", cfg.lens.wavelength);
    r.read_double("lens", "aperture_width", cfg.lens.aperture_width);
    r.read_double("lens", "focal_length", cfg.lens.focal_length);
    r.read_double("lens", "sample_spacing", cfg.lens.sample_spacing);
    r.read_double("lens", "step", cfg.lens.step);
    r.read_int("lens", "pad_factor", cfg.lens.pad_factor);

    r.read_int("array", "num_cells", cfg.array.num_cells);
    r.read_double("array", "spacing", cfg.array.spacing);

    r.read("dipole", "mu_eg", [&](const std::string& v) {
        std::istringstream ss(v);
        double x, y, z;
        char c1, c2;
        if (!(ss >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',')
            throw std::invalid_argument("expected mu_eg = x, y, z");
        cfg.dipole.mu_eg = Eigen::Vector3d(x, y, z);
    });
    r.read_double("dipole", "lambda_c", cfg.dipole.lambda_c);
    r.read_double("dipole", "lambda_p", cfg.dipole.lambda_p);
    r.read_double("dipole", "hbar_scale", cfg.dipole.hbar_scale);

    r.read_deg("grid", "min_deg", cfg.grid_min);
    r.read_deg("grid", "max_deg", cfg.grid_max);
    r.read_deg("grid", "spacing_deg", cfg.grid_spacing);

    r.read_int("run", "users", cfg.num_users);
    r.read_int("run", "snapshots", cfg.num_snapshots);
    r.read_double("run", "snr_db", cfg.snr_db);
    r.read_deg("run", "aoa_min_deg", cfg.aoa_min);
    r.read_deg("run", "aoa_max_deg", cfg.aoa_max);
    r.read_int("run", "trials", cfg.num_trials);
    r.read_u64("run", "master_seed", cfg.master_seed);
    r.read("run", "solver",
           [&](const std::string& v) { cfg.solver = parse_solver_choice(v); });
    r.read_double("run", "lo_power_factor", cfg.lo_power_factor);
    r.read_deg("run", "lo_angle_deg", cfg.lo_angle);
    r.read_bool("run", "min_separation", cfg.min_separation);
    r.read_deg("run", "min_sep_deg", cfg.min_sep_rad);
    r.read_bool("run", "block_fading", cfg.block_fading);
    r.read_double("run", "table_sigma_q2_dbm", cfg.table_sigma_q2_dbm);

    r.read("fista", "lambda", [&](const std::string& v) { cfg.fista.lambda_reg = std::stod(v); });
    r.read("fista", "tol", [&](const std::string& v) { cfg.fista.tol = std::stod(v); });
    r.read_int("fista", "max_iter", cfg.fista.max_iter);
    r.read_double("fista", "support_tau_rel", cfg.fista.support_tau_rel);

    r.reject_unknown();
    cfg.validate();
    return cfg;
}

std::string config_to_string(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[lens]\n";
    os << "wavelength = " << format_double(cfg.lens.wavelength) << "\n";
    os << "aperture_width = " << format_double(cfg.lens.aperture_width) << "\n";
    os << "focal_length = " << format_double(cfg.lens.focal_length) << "\n";
    os << "sample_spacing = " << format_double(cfg.lens.sample_spacing) << "\n";
    os << "step = " << format_double(cfg.lens.step) << "\n";
    os << "pad_factor = " << cfg.lens.pad_factor << "\n";
    os << "\n[array]\n";
    os << "num_cells = " << cfg.array.num_cells << "\n";
    os << "spacing = " << format_double(cfg.array.spacing) << "\n";
    os << "\n[dipole]\n";
    os << "mu_eg = " << format_double(cfg.dipole.mu_eg.x()) << ", "
       << format_double(cfg.dipole.mu_eg.y()) << ", " << format_double(cfg.dipole.mu_eg.z())
       << "\n";
    os << "lambda_c = " << format_double(cfg.dipole.lambda_c) << "\n";
    os << "lambda_p = " << format_double(cfg.dipole.lambda_p) << "\n";
    os << "hbar_scale = " << format_double(cfg.dipole.hbar_scale) << "\n";
    os << "\n[grid]\n";
    os << "min_deg = " << format_double(rad2deg(cfg.grid_min)) << "\n";
    os << "max_deg = " << format_double(rad2deg(cfg.grid_max)) << "\n";
    os << "spacing_deg = " << format_double(rad2deg(cfg.grid_spacing)) << "\n";
    os << "\n[run]\n";
    os << "users = " << cfg.num_users << "\n";
    os << "snapshots = " << cfg.num_snapshots << "\n";
    os << "snr_db = " << format_double(cfg.snr_db) << "\n";
    os << "aoa_min_deg = " << format_double(rad2deg(cfg.aoa_min)) << "\n";
    os << "aoa_max_deg = " << format_double(rad2deg(cfg.aoa_max)) << "\n";
    os << "trials = " << cfg.num_trials << "\n";
    os << "master_seed = " << format_u64(cfg.master_seed) << "\n";
    os << "solver = " << to_string(cfg.solver) << "\n";
    os << "lo_power_factor = " << format_double(cfg.lo_power_factor) << "\n";
    os << "lo_angle_deg = " << format_double(rad2deg(cfg.lo_angle)) << "\n";
    os << "min_separation = " << (cfg.min_separation ? "true" : "false") << "\n";
    os << "min_sep_deg = " << format_double(rad2deg(cfg.min_sep_rad)) << "\n";
    os << "block_fading = " << (cfg.block_fading ? "true" : "false") << "\n";
    os << "table_sigma_q2_dbm = " << format_double(cfg.table_sigma_q2_dbm) << "\n";
    os << "\n[fista]\n";
    if (cfg.fista.lambda_reg)
        os << "lambda = " << format_double(*cfg.fista.lambda_reg) << "\n";
    if (cfg.fista.tol)
        os << "tol = " << format_double(*cfg.fista.tol) << "\n";
    os << "max_iter = " << cfg.fista.max_iter << "\n";
    os << "support_tau_rel = " << format_double(cfg.fista.support_tau_rel) << "\n";
    return os.str();
}

} // namespace lensdoa
