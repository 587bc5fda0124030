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

#include "lensdoa/rng.hpp"

namespace lensdoa {

/// Transition dipole geometry and the optical readout constants.
///
/// hbar_scale is the normalized 1/hbar amplitude factor applied to every
/// induced field term; the default of 1 keeps the simulation in normalized
/// units (all estimation math is scale-invariant, the SNR is the knob).
struct DipoleSpec {
    Eigen::Vector3d mu_eg = Eigen::Vector3d::Zero(); // transition dipole moment, C*m
    double lambda_c = 1.0;                           // coupling beam wavelength
    double lambda_p = 1.0;                           // probe beam wavelength
    double hbar_scale = 1.0;

    void validate() const;
};

/// Propagation direction for a plane wave arriving from angle theta,
/// confined to the x-z plane with the array along x:
/// k(theta) = [sin(theta), 0, cos(theta)].
Eigen::Vector3d propagation_direction(double theta);

/// Polarization-averaged projection gain
/// eta(theta) = (|mu|^2 - (mu . k(theta))^2) / 2.
double polarization_gain(double theta, const DipoleSpec& dipole);

/// Draw a unit polarization vector uniformly on the circle orthogonal to
/// k(theta). The basis is fixed as e1 = [0,1,0], e2 = k x e1 so draws are
/// reproducible given the rng stream.
Eigen::Vector3d sample_polarization(double theta, Rng& rng);

/// Autler-Townes line splitting (Hz) for Rabi frequency omega (rad/s):
/// df = (lambda_c / lambda_p) * omega / (2 pi). Rejects negative input.
double rabi_to_at_split(double omega, const DipoleSpec& dipole);

/// Inverse of rabi_to_at_split. Rejects negative input.
double at_split_to_rabi(double delta_f, const DipoleSpec& dipole);

} // namespace lensdoa
