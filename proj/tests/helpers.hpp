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
#include <cmath>

#include "lensdoa/config.hpp"
#include "lensdoa/dictionary.hpp"
#include "lensdoa/harness.hpp"

namespace testutil {

inline double deg(double d) { return d * M_PI / 180.0; }

/// Bitwise equality of two Eigen dense objects.
template <typename A, typename B> bool bit_equal(const A& a, const B& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.array() == b.array()).all();
}

/// Production-scale configuration shared across suites.
inline const lensdoa::ExperimentConfig& prod_config() {
    static const lensdoa::ExperimentConfig cfg = lensdoa::default_config();
    return cfg;
}

/// Production-scale dictionary, built once per test binary.
inline const lensdoa::PowerDictionary& prod_dictionary() {
    static const lensdoa::PowerDictionary dict = [] {
        const auto& cfg = prod_config();
        return lensdoa::build_dictionary(cfg.make_grid(), cfg.lens, cfg.array, cfg.dipole);
    }();
    return dict;
}

/// Small lens with an odd sample count (25 samples) for cheap unit checks.
inline lensdoa::LensSpec toy_lens() {
    lensdoa::LensSpec lens;
    lens.wavelength = 1.0;
    lens.aperture_width = 5.0;
    lens.focal_length = 6.0;
    lens.sample_spacing = 0.2;
    lens.step = 1.0;
    lens.pad_factor = 4;
    return lens;
}

inline lensdoa::DipoleSpec unit_dipole() {
    lensdoa::DipoleSpec d;
    d.mu_eg = Eigen::Vector3d(0.0, 1.0, 0.0);
    return d;
}

/// Small 16-cell, 31-angle dictionary for solver oracles.
inline const lensdoa::PowerDictionary& toy_dictionary() {
    static const lensdoa::PowerDictionary dict = [] {
        const lensdoa::LensSpec lens = toy_lens();
        lensdoa::ArraySpec arr;
        arr.num_cells = 16;
        arr.spacing = 0.32;
        const lensdoa::AoaGrid grid = lensdoa::build_grid(deg(-15.0), deg(15.0), deg(1.0));
        return lensdoa::build_dictionary(grid, lens, arr, testutil::unit_dipole());
    }();
    return dict;
}

/// Direct single-shot Fresnel integral from the lens plane to the focal
/// plane: quadrature over the aperture samples with the exact quadratic
/// kernel for the full distance. Independent of the stepped DFT path.
inline Eigen::VectorXcd direct_fresnel_focal(double theta, const lensdoa::LensSpec& lens) {
    const int n = lens.sample_count();
    const double k = lens.wavenumber();
    const double z = lens.focal_steps() * lens.step;
    const lensdoa::ComplexField u0 = lensdoa::lens_input_field(theta, lens);
    Eigen::VectorXcd out(n);
    for (int p = 0; p < n; ++p) {
        std::complex<double> acc = 0.0;
        for (int q = 0; q < n; ++q) {
            const double d = lens.coord(p) - lens.coord(q);
            acc += u0.samples[q] * std::polar(1.0, k * d * d / (2.0 * z));
        }
        out[p] = acc;
    }
    return out;
}

/// Relative l2 distance between peak-normalized magnitude profiles.
inline double normalized_profile_distance(const Eigen::VectorXcd& a,
                                          const Eigen::VectorXcd& b) {
    Eigen::VectorXd ma = a.cwiseAbs();
    Eigen::VectorXd mb = b.cwiseAbs();
    ma /= ma.maxCoeff();
    mb /= mb.maxCoeff();
    return (ma - mb).norm() / mb.norm();
}

/// Naive O(N^2) DFT (sign convention matching the forward FFT).
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& v, int sign) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[i] += v[j] * std::polar(1.0, sign * 2.0 * M_PI * i * j / n);
    return out;
}

/// Projected-gradient solver for min 0.5||y - P w||^2 over w >= 0; the
/// independent reference for the lambda -> 0 limit of the l1 solve.
inline Eigen::VectorXd projected_gradient_nnls(const Eigen::MatrixXd& P,
                                               const Eigen::VectorXd& y, double lipschitz,
                                               int iterations) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(P.cols());
    for (int t = 0; t < iterations; ++t) {
        const Eigen::VectorXd grad = P.transpose() * (P * w - y);
        w = (w - grad / lipschitz).cwiseMax(0.0);
    }
    return w;
}

} // namespace testutil
