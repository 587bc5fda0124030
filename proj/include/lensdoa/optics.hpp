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
#include <complex>
#include <vector>

namespace lensdoa {

/// Geometry of the RF lens aperture and the Fresnel stepping scheme.
///
/// The aperture of width W is sampled at spacing dx into N_s points; the
/// field is advanced toward the focal plane in steps of dz. All lengths in
/// meters, angles in radians.
struct LensSpec {
    double wavelength = 0.0;     // carrier wavelength
    double aperture_width = 0.0; // W
    double focal_length = 0.0;   // f
    double sample_spacing = 0.0; // dx, must divide W and stay sub-wavelength
    double step = 0.0;           // dz
    int pad_factor = 8;          // DFT window = pad_factor * N_s

    int sample_count() const; // N_s = W / dx
    int focal_steps() const;  // n_f = round(f / dz), ties away from zero
    double wavenumber() const { return 2.0 * M_PI / wavelength; }

    /// Metric coordinate of aperture sample p (0-based):
    /// x_p = (p - (N_s - 1)/2) * dx. Half-integer center for even N_s.
    double coord(int p) const {
        return (static_cast<double>(p) - 0.5 * (sample_count() - 1)) * sample_spacing;
    }

    /// Throws std::invalid_argument when a field violates its constraints.
    void validate() const;
};

/// Line array of vapor cells centered on the lens axis.
struct ArraySpec {
    int num_cells = 0; // M
    double spacing = 0.0;

    /// Cell coordinate x_m = (m - (M-1)/2) * d, m 0-based.
    double coord(int m) const {
        return (static_cast<double>(m) - 0.5 * (num_cells - 1)) * spacing;
    }

    /// Throws when the array does not fit inside the lens aperture.
    void validate(const LensSpec& lens) const;
};

/// Sampled complex field across the aperture at one propagation depth.
/// log_scale accumulates the natural log of scalar magnitudes dropped from
/// the samples (the per-step propagation prefactor), so the stored values
/// stay O(1) over arbitrarily many steps.
struct ComplexField {
    Eigen::VectorXcd samples;
    double log_scale = 0.0;
};

/// Aperture field just behind the lens for a plane wave from angle theta:
/// unit-magnitude samples carrying the thin-lens quadratic phase plus the
/// incidence tilt. Rejects non-finite theta and |theta| >= pi/2.
ComplexField lens_input_field(double theta, const LensSpec& lens);

/// One Fresnel step of dz: zero-pad to pad_factor*N_s, multiply the DFT by
/// the propagation transfer function, inverse DFT, truncate back to N_s.
ComplexField fresnel_step(const ComplexField& u, const LensSpec& lens);

/// Full propagation from the lens plane to the focal plane (n_f steps).
/// The padded working window is carried across steps and truncated once at
/// the end; truncating to N_s between steps clips diffracted energy and
/// breaks agreement with the direct Fresnel integral.
ComplexField propagate_to_focal(double theta, const LensSpec& lens);

/// Map cell index m (0-based) to the nearest aperture sample index
/// (0-based). Throws when the index falls outside the aperture.
int cell_sample_index(int m, const LensSpec& lens, const ArraySpec& arr);

/// Focal-plane field sampled at the vapor-cell positions.
Eigen::VectorXcd sample_at_cells(const ComplexField& focal, const LensSpec& lens,
                                 const ArraySpec& arr);

/// Precomputed Fresnel stepping machinery for one lens. Immutable after
/// construction; safe to share across threads.
class FresnelPropagator {
  public:
    explicit FresnelPropagator(const LensSpec& lens);

    /// Propagate the angle-theta input field to the focal plane.
    ComplexField to_focal(double theta) const;

    /// Advance an arbitrary padded field by one step (in place).
    void step_padded(Eigen::VectorXcd& padded) const;

    const Eigen::VectorXcd& transfer() const { return transfer_; }
    int padded_length() const { return n_pad_; }
    int offset() const { return offset_; }

  private:
    LensSpec lens_;
    int n_pad_ = 0;
    int offset_ = 0; // field placed centered in the padded window
    Eigen::VectorXcd transfer_;
};

} // namespace lensdoa
