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

#include "lensdoa/measurement.hpp"

#include <stdexcept>

namespace lensdoa {

namespace {
// Distinct tags keep the block-fading draw out of the per-snapshot streams.
constexpr std::uint64_t kFadingStreamTag = 0xb10cfade00000001ULL;
} // namespace

void UserConfig::validate() const {
    if (angles.size() != powers.size())
        throw std::invalid_argument("UserConfig: angles/powers length mismatch");
    for (int k = 0; k < count(); ++k) {
        if (!(powers[k] > 0.0))
            throw std::invalid_argument("UserConfig: powers must be positive");
        if (!(std::abs(angles[k]) < M_PI / 2.0))
            throw std::invalid_argument("UserConfig: angle outside (-pi/2, pi/2)");
    }
}

void LoConfig::validate() const {
    if (!(power >= 0.0))
        throw std::invalid_argument("LoConfig: power must be >= 0");
    if (!(path_gain > 0.0))
        throw std::invalid_argument("LoConfig: |path gain| must be positive");
}

ScenarioContext make_scenario_context(const UserConfig& users, const LoConfig& lo,
                                      const LensSpec& lens, const ArraySpec& arr,
                                      const DipoleSpec& dipole) {
    users.validate();
    lo.validate();
    dipole.validate();
    arr.validate(lens);

    ScenarioContext ctx;
    ctx.users = users;
    ctx.lo = lo;
    ctx.dipole = dipole;
    ctx.num_cells = arr.num_cells;
    ctx.cell_fields.reserve(users.count());
    ctx.user_gains.resize(users.count());

    const FresnelPropagator prop(lens);
    for (int k = 0; k < users.count(); ++k) {
        ctx.cell_fields.push_back(sample_at_cells(prop.to_focal(users.angles[k]), lens, arr));
        ctx.user_gains[k] = polarization_gain(users.angles[k], dipole);
    }
    ctx.lo_gain = polarization_gain(lo.angle, dipole);
    return ctx;
}

Eigen::VectorXcd snapshot_user_field(const ScenarioContext& ctx, Rng& rng,
                                     const std::vector<std::complex<double>>* frozen_fading) {
    const int m_cells = ctx.num_cells;
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m_cells);
    for (int k = 0; k < ctx.users.count(); ++k) {
        std::complex<double> alpha;
        if (frozen_fading != nullptr)
            alpha = (*frozen_fading)[k];
        else
            alpha = rng.complex_gaussian(1.0);
        const std::complex<double> symbol = rng.unit_phase();
        const std::complex<double> common =
            ctx.dipole.hbar_scale * std::sqrt(ctx.users.powers[k]) * alpha * symbol;
        const double theta = ctx.users.angles[k];
        for (int m = 0; m < m_cells; ++m) {
            const Eigen::Vector3d eps = sample_polarization(theta, rng);
            x[m] += ctx.dipole.mu_eg.dot(eps) * common * ctx.cell_fields[k][m];
        }
    }
    return x;
}

Eigen::VectorXcd snapshot_lo(const ScenarioContext& ctx, Rng& rng) {
    const int m_cells = ctx.num_cells;
    Eigen::VectorXcd b(m_cells);
    const std::complex<double> phase = rng.unit_phase(); // e^{j phi_b}, one per snapshot
    const std::complex<double> common = ctx.dipole.hbar_scale *
                                        std::sqrt(ctx.lo.power) * ctx.lo.path_gain * phase;
    for (int m = 0; m < m_cells; ++m) {
        const Eigen::Vector3d eps = sample_polarization(ctx.lo.angle, rng);
        b[m] = ctx.dipole.mu_eg.dot(eps) * common;
    }
    return b;
}

Eigen::VectorXd measure_snapshot(const Eigen::VectorXcd& x, const Eigen::VectorXcd& b,
                                 double sigma_q2, Rng& rng) {
    if (x.size() != b.size())
        throw std::invalid_argument("measure_snapshot: field length mismatch");
    if (!(sigma_q2 >= 0.0))
        throw std::invalid_argument("measure_snapshot: noise variance must be >= 0");
    Eigen::VectorXd y(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m)
        y[m] = std::abs(x[m] + b[m] + rng.complex_gaussian(sigma_q2));
    return y;
}

Eigen::VectorXd average_power(const Eigen::MatrixXd& snapshots) {
    if (snapshots.rows() < 1)
        throw std::invalid_argument("average_power: need at least one snapshot");
    return snapshots.cwiseAbs2().colwise().mean();
}

double calibrate_noise(const ScenarioContext& ctx, double target_snr) {
    if (!(target_snr > 0.0))
        throw std::invalid_argument("calibrate_noise: SNR must be positive");
    const double hbar2 = ctx.dipole.hbar_scale * ctx.dipole.hbar_scale;
    double signal_energy = 0.0;
    for (int k = 0; k < ctx.users.count(); ++k) {
        signal_energy += ctx.users.powers[k] * hbar2 * ctx.user_gains[k] *
                         ctx.cell_fields[k].squaredNorm();
    }
    return signal_energy / (static_cast<double>(ctx.num_cells) * target_snr);
}

Eigen::VectorXd expected_profile(const ScenarioContext& ctx, double sigma_q2) {
    const double hbar2 = ctx.dipole.hbar_scale * ctx.dipole.hbar_scale;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(ctx.num_cells);
    for (int k = 0; k < ctx.users.count(); ++k) {
        p += ctx.users.powers[k] * hbar2 * ctx.user_gains[k] *
             ctx.cell_fields[k].cwiseAbs2();
    }
    const double lo_floor =
        ctx.lo.power * ctx.lo.path_gain * ctx.lo.path_gain * hbar2 * ctx.lo_gain;
    p.array() += lo_floor + sigma_q2;
    return p;
}

namespace {

MeasurementBatch run_batch(const ScenarioContext& ctx, int k_snap, double sigma_q2,
                           std::uint64_t seed, bool parallel, bool block_fading) {
    if (k_snap < 1)
        throw std::invalid_argument("simulate_batch: need at least one snapshot");

    std::vector<std::complex<double>> frozen;
    if (block_fading) {
        Rng fading_rng(mix_seed(seed, kFadingStreamTag));
        frozen.resize(ctx.users.count());
        for (auto& a : frozen)
            a = fading_rng.complex_gaussian(1.0);
    }
    const std::vector<std::complex<double>>* frozen_ptr = block_fading ? &frozen : nullptr;

    MeasurementBatch batch;
    batch.sigma_q2 = sigma_q2;
    batch.snapshots.resize(k_snap, ctx.num_cells);

    // Each snapshot owns an rng stream keyed by its index, so the parallel
    // and serial paths produce identical rows.
    auto fill_row = [&](int i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const Eigen::VectorXcd x = snapshot_user_field(ctx, rng, frozen_ptr);
        const Eigen::VectorXcd b = snapshot_lo(ctx, rng);
        batch.snapshots.row(i) = measure_snapshot(x, b, sigma_q2, rng).transpose();
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < k_snap; ++i)
            fill_row(i);
    } else {
        for (int i = 0; i < k_snap; ++i)
            fill_row(i);
    }

    batch.y_bar = average_power(batch.snapshots);
    return batch;
}

} // namespace

MeasurementBatch simulate_batch(const ScenarioContext& ctx, int k_snap, double sigma_q2,
                                std::uint64_t seed, bool parallel, bool block_fading) {
    return run_batch(ctx, k_snap, sigma_q2, seed, parallel, block_fading);
}

MeasurementBatch simulate_batch_serial(const ScenarioContext& ctx, int k_snap,
                                       double sigma_q2, std::uint64_t seed,
                                       bool block_fading) {
    return run_batch(ctx, k_snap, sigma_q2, seed, false, block_fading);
}

} // namespace lensdoa
