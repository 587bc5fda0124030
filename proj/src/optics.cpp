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

#include "lensdoa/optics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lensdoa {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. Plans are created once per length under a lock, with
// FFTW_UNALIGNED so they run on any caller buffer.
class PlanCache {
  public:
    struct Plans {
        fftw_plan forward = nullptr;
        fftw_plan inverse = nullptr;
    };

    static const Plans& get(int n) {
        static PlanCache cache;
        std::lock_guard<std::mutex> lock(cache.mutex_);
        auto it = cache.plans_.find(n);
        if (it != cache.plans_.end())
            return it->second;
        Eigen::VectorXcd scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        Plans p;
        p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.inverse = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (p.forward == nullptr || p.inverse == nullptr)
            throw std::runtime_error("FFTW plan creation failed");
        return cache.plans_.emplace(n, p).first->second;
    }

  private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.inverse);
        }
    }
    std::mutex mutex_;
    std::map<int, Plans> plans_;
};

void fft_in_place(Eigen::VectorXcd& v) {
    const auto& plans = PlanCache::get(static_cast<int>(v.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(plans.forward, buf, buf);
}

void ifft_in_place(Eigen::VectorXcd& v) {
    const auto& plans = PlanCache::get(static_cast<int>(v.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(plans.inverse, buf, buf);
    v /= static_cast<double>(v.size());
}

} // namespace

int LensSpec::sample_count() const {
    return static_cast<int>(std::round(aperture_width / sample_spacing));
}

int LensSpec::focal_steps() const {
    return static_cast<int>(std::round(focal_length / step));
}

void LensSpec::validate() const {
    if (!(wavelength > 0.0) || !(aperture_width > 0.0) || !(focal_length > 0.0) ||
        !(sample_spacing > 0.0) || !(step > 0.0))
        throw std::invalid_argument("LensSpec: all lengths must be positive");
    const double ratio = aperture_width / sample_spacing;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
        throw std::invalid_argument("LensSpec: W / dx must be a positive integer");
    if (focal_steps() < 1)
        throw std::invalid_argument("LensSpec: f / dz must round to a positive step count");
    if (!(sample_spacing < wavelength))
        throw std::invalid_argument("LensSpec: aperture sampling must be sub-wavelength");
    if (pad_factor < 1)
        throw std::invalid_argument("LensSpec: pad_factor must be >= 1");
}

void ArraySpec::validate(const LensSpec& lens) const {
    if (num_cells < 1)
        throw std::invalid_argument("ArraySpec: need at least one cell");
    if (!(spacing > 0.0))
        throw std::invalid_argument("ArraySpec: spacing must be positive");
    if ((num_cells - 1) * spacing > lens.aperture_width)
        throw std::invalid_argument("ArraySpec: array does not fit inside the aperture");
    for (int m = 0; m < num_cells; ++m)
        cell_sample_index(m, lens, *this);
}

ComplexField lens_input_field(double theta, const LensSpec& lens) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("lens_input_field: theta must be finite");
    if (!(std::abs(theta) < M_PI / 2.0))
        throw std::invalid_argument("lens_input_field: |theta| must be below pi/2");
    lens.validate();

    const int n = lens.sample_count();
    const double k = lens.wavenumber();
    const double f = lens.focal_length;
    const double s = std::sin(theta);

    ComplexField field;
    field.samples.resize(n);
    for (int p = 0; p < n; ++p) {
        const double x = lens.coord(p);
        const double phase = -k * (x * x + 2.0 * f * x * s) / (2.0 * f);
        field.samples[p] = std::polar(1.0, phase);
    }
    return field;
}

FresnelPropagator::FresnelPropagator(const LensSpec& lens) : lens_(lens) {
    lens.validate();
    const int n = lens.sample_count();
    n_pad_ = n * lens.pad_factor;
    offset_ = (n_pad_ - n) / 2; // centered placement keeps even symmetry exact

    // Transfer function of one Fresnel step: the Fourier transform of the
    // quadratic chirp evaluated on the DFT frequency grid,
    // exp(-j pi lambda dz nu^2). Sampling the chirp in space instead aliases
    // at these step sizes (the sampled chirp is periodic), so the spectral
    // form is used; it has unit magnitude and conserves energy per step.
    transfer_.resize(n_pad_);
    const double lam_dz = lens.wavelength * lens.step;
    const double dnu = 1.0 / (static_cast<double>(n_pad_) * lens.sample_spacing);
    for (int i = 0; i < n_pad_; ++i) {
        const int wrapped = (i <= n_pad_ / 2) ? i : i - n_pad_;
        const double nu = wrapped * dnu;
        transfer_[i] = std::polar(1.0, -M_PI * lam_dz * nu * nu);
    }
}

void FresnelPropagator::step_padded(Eigen::VectorXcd& padded) const {
    fft_in_place(padded);
    padded.array() *= transfer_.array();
    ifft_in_place(padded);
}

ComplexField FresnelPropagator::to_focal(double theta) const {
    ComplexField u = lens_input_field(theta, lens_);
    const int n = lens_.sample_count();
    const int n_f = lens_.focal_steps();

    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(n_pad_);
    padded.segment(offset_, n) = u.samples;
    for (int s = 0; s < n_f; ++s)
        step_padded(padded);

    ComplexField out;
    out.samples = padded.segment(offset_, n);
    // Magnitude of the analytic per-step prefactor, dropped from samples.
    out.log_scale =
        u.log_scale - n_f * std::log(lens_.wavelength * lens_.step);
    return out;
}

ComplexField fresnel_step(const ComplexField& u, const LensSpec& lens) {
    FresnelPropagator prop(lens);
    const int n = lens.sample_count();
    if (u.samples.size() != n)
        throw std::invalid_argument("fresnel_step: field length does not match the lens");

    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(prop.padded_length());
    padded.segment(prop.offset(), n) = u.samples;
    prop.step_padded(padded);

    ComplexField out;
    out.samples = padded.segment(prop.offset(), n);
    out.log_scale = u.log_scale - std::log(lens.wavelength * lens.step);
    return out;
}

ComplexField propagate_to_focal(double theta, const LensSpec& lens) {
    return FresnelPropagator(lens).to_focal(theta);
}

int cell_sample_index(int m, const LensSpec& lens, const ArraySpec& arr) {
    const int n = lens.sample_count();
    // round(x_m / dx + (N_s + 1) / 2) in 1-based indexing, ties away from
    // zero. The position is formed with a single rounding step so exact
    // half-sample ties (integer spacing ratio, even N_s) stay exact instead
    // of falling to either side on floating-point noise.
    const double ratio = arr.spacing / lens.sample_spacing;
    const double pos =
        (static_cast<double>(m) - 0.5 * (arr.num_cells - 1)) * ratio + 0.5 * (n + 1);
    const int p = static_cast<int>(std::round(pos)) - 1;
    if (p < 0 || p >= n)
        throw std::out_of_range("cell_sample_index: cell maps outside the aperture");
    return p;
}

Eigen::VectorXcd sample_at_cells(const ComplexField& focal, const LensSpec& lens,
                                 const ArraySpec& arr) {
    if (focal.samples.size() != lens.sample_count())
        throw std::invalid_argument("sample_at_cells: field length does not match the lens");
    Eigen::VectorXcd out(arr.num_cells);
    for (int m = 0; m < arr.num_cells; ++m)
        out[m] = focal.samples[cell_sample_index(m, lens, arr)];
    return out;
}

} // namespace lensdoa
