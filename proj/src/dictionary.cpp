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

#include "lensdoa/dictionary.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "lensdoa/rng.hpp"

namespace lensdoa {

AoaGrid build_grid(double min_angle, double max_angle, double spacing) {
    if (!(min_angle < max_angle))
        throw std::invalid_argument("build_grid: min must be below max");
    if (!(spacing > 0.0))
        throw std::invalid_argument("build_grid: spacing must be positive");
    if (!(min_angle > -M_PI / 2.0) || !(max_angle < M_PI / 2.0))
        throw std::invalid_argument("build_grid: range must lie inside (-pi/2, pi/2)");

    const int steps = static_cast<int>(std::floor((max_angle - min_angle) / spacing + 1e-9));
    const int count = steps + 1;
    if (count < 2)
        throw std::invalid_argument("build_grid: grid needs at least two points");

    AoaGrid grid;
    grid.spacing = spacing;
    grid.angles.resize(count);
    for (int i = 0; i < count; ++i)
        grid.angles[i] = min_angle + i * spacing;
    return grid;
}

Eigen::VectorXd build_atom(double theta, const LensSpec& lens, const ArraySpec& arr,
                           const DipoleSpec& dipole) {
    const ComplexField focal = propagate_to_focal(theta, lens);
    const Eigen::VectorXcd a = sample_at_cells(focal, lens, arr);
    return polarization_gain(theta, dipole) * a.cwiseAbs2();
}

Eigen::VectorXd center(const Eigen::VectorXd& v) {
    return v.array() - v.mean();
}

double lipschitz_bound(const Eigen::MatrixXd& centered) {
    const int d = static_cast<int>(centered.cols());
    // Deterministic pseudo-random start: a symmetric start vector can be
    // exactly orthogonal to the dominant eigenvector when the grid is
    // symmetric, which silently locks the iteration into a lower subspace.
    Eigen::VectorXd v(d);
    Rng rng(0xd1c7b0u);
    for (int i = 0; i < d; ++i)
        v[i] = rng.gaussian();
    v.normalize();
    double estimate = 0.0;
    const int max_sweeps = 200;
    const double tol = 1e-6;
    for (int it = 0; it < max_sweeps; ++it) {
        const Eigen::VectorXd pv = centered * v;
        const Eigen::VectorXd gv = centered.transpose() * pv; // (P^T P) v
        const double norm = gv.norm();
        if (norm == 0.0) {
            // v landed in the null space; restart from a coordinate vector
            v.setZero();
            v[it % d] = 1.0;
            continue;
        }
        estimate = pv.squaredNorm(); // Rayleigh quotient, ||v|| = 1
        // residual certificate: theta is within tol * theta of an eigenvalue
        if ((gv - estimate * v).norm() <= tol * estimate)
            break;
        v = gv / norm;
    }
    return estimate * 1.01; // safety margin over the iteration tolerance
}

std::vector<ComplexField> grid_focal_fields(const AoaGrid& grid, const LensSpec& lens,
                                            bool parallel) {
    const FresnelPropagator prop(lens);
    const int d = grid.size();
    std::vector<ComplexField> fields(d);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < d; ++i)
            fields[i] = prop.to_focal(grid[i]);
    } else {
        for (int i = 0; i < d; ++i)
            fields[i] = prop.to_focal(grid[i]);
    }
    return fields;
}

PowerDictionary assemble_dictionary(const std::vector<ComplexField>& fields,
                                    const AoaGrid& grid, const LensSpec& lens,
                                    const ArraySpec& arr, const DipoleSpec& dipole) {
    if (static_cast<int>(fields.size()) != grid.size())
        throw std::invalid_argument("assemble_dictionary: field count != grid size");
    arr.validate(lens);
    dipole.validate();

    const int m = arr.num_cells;
    const int d = grid.size();
    PowerDictionary dict;
    dict.grid = grid;
    dict.atoms.resize(m, d);
    dict.centered.resize(m, d);
    dict.centered_norms.resize(d);

    const double full_gain = 0.5 * dipole.mu_eg.squaredNorm();
    for (int i = 0; i < d; ++i) {
        const Eigen::VectorXcd a = sample_at_cells(fields[i], lens, arr);
        const Eigen::VectorXd power = a.cwiseAbs2();
        const double gain = polarization_gain(grid[i], dipole);
        if (!(gain > 1e-12 * full_gain) || !(power.maxCoeff() > 0.0))
            throw std::runtime_error("assemble_dictionary: zero atom (degenerate dipole "
                                     "geometry)");
        const Eigen::VectorXd atom = gain * power;
        dict.atoms.col(i) = atom;
        dict.centered.col(i) = center(atom);
        dict.centered_norms[i] = dict.centered.col(i).norm();
    }
    dict.lipschitz = lipschitz_bound(dict.centered);
    return dict;
}

PowerDictionary build_dictionary(const AoaGrid& grid, const LensSpec& lens,
                                 const ArraySpec& arr, const DipoleSpec& dipole) {
    return assemble_dictionary(grid_focal_fields(grid, lens, true), grid, lens, arr,
                               dipole);
}

PowerDictionary build_dictionary_serial(const AoaGrid& grid, const LensSpec& lens,
                                        const ArraySpec& arr, const DipoleSpec& dipole) {
    return assemble_dictionary(grid_focal_fields(grid, lens, false), grid, lens, arr,
                               dipole);
}

namespace {

void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = splitmix64(h ^ bits);
}

void hash_u64(std::uint64_t& h, std::uint64_t v) { h = splitmix64(h ^ v); }

constexpr std::uint64_t kDictMagic = 0x4c444f4144494354ULL; // "LDOADICT"
constexpr std::uint32_t kDictVersion = 1;

template <typename T> void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T> T read_pod(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void write_matrix(std::ofstream& os, const Eigen::MatrixXd& mat) {
    // row-major order, little-endian doubles
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c)
            write_pod(os, mat(r, c));
}

Eigen::MatrixXd read_matrix(std::ifstream& is, int rows, int cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            mat(r, c) = read_pod<double>(is);
    return mat;
}

} // namespace

std::uint64_t spec_hash(const LensSpec& lens, const ArraySpec& arr, const DipoleSpec& dipole,
                        const AoaGrid& grid) {
    std::uint64_t h = 0x6c656e73646f6131ULL;
    hash_double(h, lens.wavelength);
    hash_double(h, lens.aperture_width);
    hash_double(h, lens.focal_length);
    hash_double(h, lens.sample_spacing);
    hash_double(h, lens.step);
    hash_u64(h, static_cast<std::uint64_t>(lens.pad_factor));
    hash_u64(h, static_cast<std::uint64_t>(arr.num_cells));
    hash_double(h, arr.spacing);
    hash_double(h, dipole.mu_eg.x());
    hash_double(h, dipole.mu_eg.y());
    hash_double(h, dipole.mu_eg.z());
    hash_double(h, dipole.lambda_c);
    hash_double(h, dipole.lambda_p);
    hash_double(h, dipole.hbar_scale);
    hash_u64(h, static_cast<std::uint64_t>(grid.size()));
    hash_double(h, grid.angles[0]);
    hash_double(h, grid.angles[grid.size() - 1]);
    hash_double(h, grid.spacing);
    return h;
}

void save_dictionary(const PowerDictionary& dict, const std::string& path,
                     std::uint64_t hash) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("save_dictionary: cannot open " + path);
    write_pod(os, kDictMagic);
    write_pod(os, kDictVersion);
    write_pod(os, static_cast<std::uint32_t>(dict.num_cells()));
    write_pod(os, static_cast<std::uint32_t>(dict.num_atoms()));
    write_pod(os, hash);
    write_pod(os, dict.grid.angles[0]);
    write_pod(os, dict.grid.angles[dict.grid.size() - 1]);
    write_pod(os, dict.grid.spacing);
    write_pod(os, dict.lipschitz);
    write_matrix(os, dict.atoms);
    write_matrix(os, dict.centered);
    if (!os)
        throw std::runtime_error("save_dictionary: write failed for " + path);
}

PowerDictionary load_dictionary(const std::string& path, std::uint64_t expected_hash) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("load_dictionary: cannot open " + path);
    if (read_pod<std::uint64_t>(is) != kDictMagic)
        throw std::runtime_error("load_dictionary: bad magic in " + path);
    if (read_pod<std::uint32_t>(is) != kDictVersion)
        throw std::runtime_error("load_dictionary: unsupported version in " + path);
    const int m = static_cast<int>(read_pod<std::uint32_t>(is));
    const int d = static_cast<int>(read_pod<std::uint32_t>(is));
    const std::uint64_t stored_hash = read_pod<std::uint64_t>(is);
    if (stored_hash != expected_hash)
        throw std::runtime_error("load_dictionary: cache was built for different "
                                 "parameters (hash mismatch)");

    PowerDictionary dict;
    const double gmin = read_pod<double>(is);
    const double gmax = read_pod<double>(is);
    const double gspacing = read_pod<double>(is);
    dict.lipschitz = read_pod<double>(is);
    dict.grid = build_grid(gmin, gmax + 0.5 * gspacing, gspacing);
    if (dict.grid.size() != d)
        throw std::runtime_error("load_dictionary: grid size mismatch in " + path);
    dict.atoms = read_matrix(is, m, d);
    dict.centered = read_matrix(is, m, d);
    if (!is)
        throw std::runtime_error("load_dictionary: truncated file " + path);
    dict.centered_norms.resize(d);
    for (int i = 0; i < d; ++i)
        dict.centered_norms[i] = dict.centered.col(i).norm();
    return dict;
}

} // namespace lensdoa
