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

#include "lensdoa/atomic.hpp"

#include <cmath>
#include <stdexcept>

namespace lensdoa {

void DipoleSpec::validate() const {
    if (!(mu_eg.norm() > 0.0))
        throw std::invalid_argument("DipoleSpec: dipole moment must be nonzero");
    if (!(lambda_c > 0.0) || !(lambda_p > 0.0))
        throw std::invalid_argument("DipoleSpec: beam wavelengths must be positive");
    if (!(hbar_scale > 0.0))
        throw std::invalid_argument("DipoleSpec: hbar_scale must be positive");
}

Eigen::Vector3d propagation_direction(double theta) {
    if (!std::isfinite(theta) || !(std::abs(theta) < M_PI / 2.0))
        throw std::invalid_argument("propagation_direction: |theta| must be below pi/2");
    return {std::sin(theta), 0.0, std::cos(theta)};
}

double polarization_gain(double theta, const DipoleSpec& dipole) {
    dipole.validate();
    const Eigen::Vector3d k = propagation_direction(theta);
    const double proj = dipole.mu_eg.dot(k);
    return 0.5 * (dipole.mu_eg.squaredNorm() - proj * proj);
}

Eigen::Vector3d sample_polarization(double theta, Rng& rng) {
    const Eigen::Vector3d k = propagation_direction(theta);
    const Eigen::Vector3d e1(0.0, 1.0, 0.0); // orthogonal to k for any theta
    const Eigen::Vector3d e2 = k.cross(e1);  // (-cos theta, 0, sin theta)
    const double psi = rng.uniform(0.0, 2.0 * M_PI);
    return std::cos(psi) * e1 + std::sin(psi) * e2;
}

double rabi_to_at_split(double omega, const DipoleSpec& dipole) {
    if (!(omega >= 0.0))
        throw std::invalid_argument("rabi_to_at_split: Rabi frequency must be >= 0");
    return dipole.lambda_c / dipole.lambda_p * omega / (2.0 * M_PI);
}

double at_split_to_rabi(double delta_f, const DipoleSpec& dipole) {
    if (!(delta_f >= 0.0))
        throw std::invalid_argument("at_split_to_rabi: splitting must be >= 0");
    return delta_f * 2.0 * M_PI * dipole.lambda_p / dipole.lambda_c;
}

} // namespace lensdoa
