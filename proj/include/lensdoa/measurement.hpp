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

#include <Eigen/Dense>
#include <vector>

#include "lensdoa/atomic.hpp"
#include "lensdoa/optics.hpp"

namespace lensdoa {

/// Transmitting users: arrival angles (radians) and transmit powers.
struct UserConfig {
    Eigen::VectorXd angles;
    Eigen::VectorXd powers;

    int count() const { return static_cast<int>(angles.size()); }
    void validate() const;
};

/// Local-oscillator reference field added before the magnitude detection.
struct LoConfig {
    double power = 0.0;     // P_b
    double path_gain = 1.0; // |beta| > 0 when the LO is active
    double angle = 0.0;     // known LO arrival angle theta_b

    void validate() const;
};

/// Per-snapshot magnitude observations and their time-averaged power.
struct MeasurementBatch {
    Eigen::MatrixXd snapshots; // K_snap x M, elementwise nonnegative
    Eigen::VectorXd y_bar;     // mean of squared snapshot rows
    double sigma_q2 = 0.0;     // shot-noise variance per complex sample
};

/// Everything a snapshot draw needs, precomputed once per scenario:
/// the sampled focal fields per user and the projection gains.
struct ScenarioContext {
    UserConfig users;
    LoConfig lo;
    DipoleSpec dipole;
    int num_cells = 0;
    std::vector<Eigen::VectorXcd> cell_fields; // a_lens(theta_k), one per user
    Eigen::VectorXd user_gains;                // eta(theta_k)
    double lo_gain = 0.0;                      // eta(theta_b)
};

ScenarioContext make_scenario_context(const UserConfig& users, const LoConfig& lo,
                                      const LensSpec& lens, const ArraySpec& arr,
                                      const DipoleSpec& dipole);

/// One snapshot of the user-induced complex field across cells; draws fresh
/// fading alpha_k, unit-circle symbol s_k, and per-cell polarizations.
/// When `frozen_fading` is non-null those alphas are used instead of fresh
/// draws (block-fading mode).
Eigen::VectorXcd snapshot_user_field(const ScenarioContext& ctx, Rng& rng,
                                     const std::vector<std::complex<double>>* frozen_fading =
                                         nullptr);

/// One snapshot of the LO field: common random phase, per-cell polarization.
Eigen::VectorXcd snapshot_lo(const ScenarioContext& ctx, Rng& rng);

/// Magnitude observation y = |x + b + n_q| with n_q ~ CN(0, sigma_q2 I).
Eigen::VectorXd measure_snapshot(const Eigen::VectorXcd& x, const Eigen::VectorXcd& b,
                                 double sigma_q2, Rng& rng);

/// Time-averaged power profile: mean of elementwise-squared snapshot rows.
Eigen::VectorXd average_power(const Eigen::MatrixXd& snapshots);

/// Shot-noise variance that realizes the target (linear) SNR, using the
/// closed-form signal energy (cross terms vanish in expectation):
/// sigma_q2 = sum_k w_k eta_k sum_m g_m(theta_k) / (M * snr).
double calibrate_noise(const ScenarioContext& ctx, double target_snr);

/// Expected value of the averaged power profile: the multi-user power
/// profile plus the LO floor plus the noise floor. Serves as the
/// statistical oracle for y_bar.
Eigen::VectorXd expected_profile(const ScenarioContext& ctx, double sigma_q2);

/// Simulate k_snap independent snapshots. Each snapshot seeds its own rng
/// sub-stream from (seed, snapshot index), so results do not depend on the
/// execution order; the OpenMP and serial paths are bit-identical.
MeasurementBatch simulate_batch(const ScenarioContext& ctx, int k_snap, double sigma_q2,
                                std::uint64_t seed, bool parallel = true,
                                bool block_fading = false);

/// Serial reference for simulate_batch (kept for tests and benchmarks).
MeasurementBatch simulate_batch_serial(const ScenarioContext& ctx, int k_snap,
                                       double sigma_q2, std::uint64_t seed,
                                       bool block_fading = false);

} // namespace lensdoa
