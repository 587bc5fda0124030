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

#pragma once

#include <cstdint>
#include <string>

#include "lensdoa/atomic.hpp"
#include "lensdoa/dictionary.hpp"
#include "lensdoa/nnlasso.hpp"
#include "lensdoa/optics.hpp"

namespace lensdoa {

enum class SolverChoice { nnlasso, sic, both };

SolverChoice parse_solver_choice(const std::string& s);
std::string to_string(SolverChoice c);

/// Full description of one experiment: geometry, atomic constants, grid,
/// scenario statistics, and solver settings.
struct ExperimentConfig {
    LensSpec lens;
    ArraySpec array;
    DipoleSpec dipole;

    double grid_min = 0.0; // radians
    double grid_max = 0.0;
    double grid_spacing = 0.0;

    int num_users = 0;     // K_U
    int num_snapshots = 0; // K_snap
    double snr_db = 0.0;
    double aoa_min = 0.0; // scenario draw range, radians
    double aoa_max = 0.0;
    int num_trials = 0;
    std::uint64_t master_seed = 0;
    SolverChoice solver = SolverChoice::both;

    double lo_power_factor = 10.0; // LO power = factor * total user power
    double lo_angle = 0.0;
    bool min_separation = true; // enforce min_sep_rad between drawn angles
    double min_sep_rad = 0.0;   // 0 resolves to 2 * grid_spacing
    bool block_fading = false;

    // Recorded for provenance only; the operative noise level always comes
    // from the SNR calibration.
    double table_sigma_q2_dbm = -191.0;

    FistaConfig fista;

    // When non-empty, trials use exactly these angles instead of drawing.
    Eigen::VectorXd fixed_angles;

    AoaGrid make_grid() const { return build_grid(grid_min, grid_max, grid_spacing); }
    void validate() const;
};

/// Shipped defaults: 5 GHz carrier, 40-wavelength aperture with focal
/// length 52 wavelengths sampled at lambda/8, 64 half-wavelength-spaced
/// cells, 3 users drawn from +-15 degrees, 1024 snapshots, 5 dB SNR,
/// y-oriented dipole of 1785.916 q a0.
ExperimentConfig default_config();

/// Parse a sectioned key/value config file; unset keys keep their defaults.
/// Throws std::runtime_error with a line reference on parse errors.
ExperimentConfig load_config(const std::string& path);

/// Render a config in the same file format (used for the run sidecar).
std::string config_to_string(const ExperimentConfig& cfg);

} // namespace lensdoa
