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
#include <string>
#include <vector>

#include "lensdoa/atomic.hpp"
#include "lensdoa/optics.hpp"

namespace lensdoa {

/// Uniform grid of candidate arrival angles (radians).
struct AoaGrid {
    Eigen::VectorXd angles;
    double spacing = 0.0;

    int size() const { return static_cast<int>(angles.size()); }
    double operator[](int i) const { return angles[i]; }
};

/// Build a uniform grid over [min_angle, max_angle]. Both endpoints are
/// included when the range is an integral number of spacings. Rejects
/// grids with fewer than two points or ranges outside (-pi/2, pi/2).
AoaGrid build_grid(double min_angle, double max_angle, double spacing);

/// Grid of angle-indexed power-profile atoms plus their centered versions.
struct PowerDictionary {
    Eigen::MatrixXd atoms;          // M x d, column i = atom at grid angle i
    Eigen::MatrixXd centered;       // M x d, mean-removed columns
    Eigen::VectorXd centered_norms; // per-column l2 norms of `centered`
    AoaGrid grid;
    double lipschitz = 0.0; // upper bound on ||centered^T centered||_2

    int num_cells() const { return static_cast<int>(atoms.rows()); }
    int num_atoms() const { return static_cast<int>(atoms.cols()); }
};

/// Nonnegative power atom for one angle: eta(theta) times the squared
/// magnitude of the focal field sampled at the vapor cells.
Eigen::VectorXd build_atom(double theta, const LensSpec& lens, const ArraySpec& arr,
                           const DipoleSpec& dipole);

/// Remove the mean component: v - mean(v) * 1. Idempotent, kills constants.
Eigen::VectorXd center(const Eigen::VectorXd& v);

/// Largest eigenvalue of centered^T centered by power iteration
/// (tolerance 1e-6, at most 200 sweeps), inflated by 1% so the result is a
/// safe Lipschitz bound for gradient steps.
double lipschitz_bound(const Eigen::MatrixXd& centered);

/// Focal-plane fields for every grid angle; independent of the array, so
/// one set serves dictionaries for any cell count. Parallelizes over grid
/// columns when `parallel` is set.
std::vector<ComplexField> grid_focal_fields(const AoaGrid& grid, const LensSpec& lens,
                                            bool parallel = true);

/// Assemble a dictionary from precomputed focal fields.
PowerDictionary assemble_dictionary(const std::vector<ComplexField>& fields,
                                    const AoaGrid& grid, const LensSpec& lens,
                                    const ArraySpec& arr, const DipoleSpec& dipole);

/// Build the full dictionary (OpenMP over grid columns).
PowerDictionary build_dictionary(const AoaGrid& grid, const LensSpec& lens,
                                 const ArraySpec& arr, const DipoleSpec& dipole);

/// Serial reference implementation; produces bit-identical results and is
/// kept for tests and benchmarking against the parallel path.
PowerDictionary build_dictionary_serial(const AoaGrid& grid, const LensSpec& lens,
                                        const ArraySpec& arr, const DipoleSpec& dipole);

/// Hash of every parameter the dictionary depends on; stored in the cache
/// file header and checked on load.
std::uint64_t spec_hash(const LensSpec& lens, const ArraySpec& arr, const DipoleSpec& dipole,
                        const AoaGrid& grid);

/// Persist to the binary cache format (header + row-major little-endian
/// doubles). Throws on I/O failure.
void save_dictionary(const PowerDictionary& dict, const std::string& path,
                     std::uint64_t hash);

/// Load a cache file, verifying the stored hash against `expected_hash`.
PowerDictionary load_dictionary(const std::string& path, std::uint64_t expected_hash);

} // namespace lensdoa
