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

#include <doctest.h>

#include "helpers.hpp"
#include "lensdoa/optics.hpp"

using namespace lensdoa;
using testutil::deg;

TEST_SUITE_BEGIN("optics");

TEST_CASE("lens spec sanity at production parameters") {
    const LensSpec lens = testutil::prod_config().lens;
    CHECK(lens.sample_count() == 320);
    CHECK(lens.focal_steps() == 52);
    lens.validate();
}

TEST_CASE("lens spec rejects bad geometry") {
    LensSpec lens = testutil::toy_lens();
    lens.sample_spacing = 0.3; // W / dx not integral
    CHECK_THROWS_AS(lens.validate(), std::invalid_argument);
    lens = testutil::toy_lens();
    lens.sample_spacing = 1.5; // super-wavelength sampling
    CHECK_THROWS_AS(lens.validate(), std::invalid_argument);
    lens = testutil::toy_lens();
    lens.pad_factor = 0;
    CHECK_THROWS_AS(lens.validate(), std::invalid_argument);
}

TEST_CASE("input field has unit magnitude and symmetric phase at broadside") {
    const LensSpec lens = testutil::toy_lens(); // odd sample count
    const ComplexField u = lens_input_field(0.0, lens);
    const int n = lens.sample_count();
    for (int p = 0; p < n; ++p)
        CHECK(std::abs(u.samples[p]) == doctest::Approx(1.0).epsilon(1e-12));
    for (int p = 0; p < n; ++p)
        CHECK(std::arg(u.samples[p]) ==
              doctest::Approx(std::arg(u.samples[n - 1 - p])).epsilon(1e-10));
}

TEST_CASE("input field center sample is exactly one for odd sample counts") {
    const LensSpec lens = testutil::toy_lens();
    const int center = (lens.sample_count() - 1) / 2;
    for (double theta : {0.0, deg(7.0), deg(-12.0)}) {
        const ComplexField u = lens_input_field(theta, lens);
        CHECK(std::abs(u.samples[center] - 1.0) < 1e-12);
    }
}

TEST_CASE("input field phase gradient at center equals -k sin(theta)") {
    const LensSpec lens = testutil::prod_config().lens;
    const double theta = deg(10.0);
    const ComplexField u = lens_input_field(theta, lens);
    // central difference across the two middle samples; the quadratic term
    // cancels exactly there
    const int n = lens.sample_count();
    const int lo = n / 2 - 1, hi = n / 2;
    const double gradient =
        std::arg(u.samples[hi] * std::conj(u.samples[lo])) / lens.sample_spacing;
    const double expected = -lens.wavenumber() * std::sin(theta);
    CHECK(gradient == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("input field rejects non-finite and grazing angles") {
    const LensSpec lens = testutil::toy_lens();
    CHECK_THROWS_AS(lens_input_field(std::nan(""), lens), std::invalid_argument);
    CHECK_THROWS_AS(lens_input_field(M_PI / 2.0, lens), std::invalid_argument);
}

TEST_CASE("fresnel step maps zero field to zero field") {
    const LensSpec lens = testutil::toy_lens();
    ComplexField u;
    u.samples = Eigen::VectorXcd::Zero(lens.sample_count());
    const ComplexField out = fresnel_step(u, lens);
    CHECK(out.samples.norm() == 0.0);
}

TEST_CASE("fresnel step equals direct cyclic convolution with the step kernel") {
    // Independent path: build the step kernel via naive DFTs (no FFT
    // library) and convolve directly; compare one step on an impulse.
    const LensSpec lens = testutil::toy_lens();
    const int n = lens.sample_count();
    const FresnelPropagator prop(lens);
    const int n_pad = prop.padded_length();

    const Eigen::VectorXcd kernel =
        testutil::naive_dft(prop.transfer(), +1) / double(n_pad);

    ComplexField impulse;
    impulse.samples = Eigen::VectorXcd::Zero(n);
    const int center = n / 2;
    impulse.samples[center] = 1.0;

    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(n_pad);
    padded[prop.offset() + center] = 1.0;
    Eigen::VectorXcd direct = Eigen::VectorXcd::Zero(n_pad);
    for (int p = 0; p < n_pad; ++p)
        for (int q = 0; q < n_pad; ++q)
            direct[p] += padded[q] * kernel[(p - q + n_pad) % n_pad];

    const ComplexField stepped = fresnel_step(impulse, lens);
    for (int p = 0; p < n; ++p)
        CHECK(std::abs(stepped.samples[p] - direct[prop.offset() + p]) <
              1e-9 * direct.norm());
}

TEST_CASE("step transfer has unit magnitude per bin and preserves DFT energy") {
    const LensSpec lens = testutil::prod_config().lens;
    const FresnelPropagator prop(lens);
    for (int i = 0; i < prop.padded_length(); ++i)
        CHECK(std::abs(prop.transfer()[i]) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(7);
    Eigen::VectorXcd u(prop.padded_length());
    for (int i = 0; i < u.size(); ++i)
        u[i] = rng.complex_gaussian(1.0);
    const Eigen::VectorXcd product = u.cwiseProduct(prop.transfer());
    CHECK(product.norm() == doctest::Approx(u.norm()).epsilon(1e-12));
}

TEST_CASE("broadside focal field is even-symmetric and peaks at the center") {
    const LensSpec lens = testutil::prod_config().lens;
    const ComplexField focal = propagate_to_focal(0.0, lens);
    const int n = lens.sample_count();
    const Eigen::VectorXd mag = focal.samples.cwiseAbs();
    for (int p = 0; p < n; ++p)
        CHECK(mag[p] == doctest::Approx(mag[n - 1 - p]).epsilon(1e-6));
    int argmax = 0;
    mag.maxCoeff(&argmax);
    CHECK(std::abs(lens.coord(argmax)) <= 0.5 * lens.sample_spacing + 1e-12);
}

TEST_CASE("focal peak sits within one sample of -f sin(theta)") {
    const LensSpec lens = testutil::prod_config().lens;
    for (double theta_deg : {-15.0, -10.0, -5.0, 2.0, 5.0, 10.0, 15.0}) {
        const double theta = deg(theta_deg);
        const ComplexField focal = propagate_to_focal(theta, lens);
        int argmax = 0;
        focal.samples.cwiseAbs().maxCoeff(&argmax);
        const double target = -lens.focal_length * std::sin(theta);
        CHECK(std::abs(lens.coord(argmax) - target) <=
              lens.sample_spacing * (1.0 + 1e-9));
    }
}

TEST_CASE("stepped propagation matches the direct Fresnel integral oracle") {
    const LensSpec lens = testutil::prod_config().lens;
    for (double theta_deg : {0.0, 10.0}) {
        const ComplexField focal = propagate_to_focal(deg(theta_deg), lens);
        const Eigen::VectorXcd oracle = testutil::direct_fresnel_focal(deg(theta_deg), lens);
        CHECK(testutil::normalized_profile_distance(focal.samples, oracle) < 0.02);
    }
}

TEST_CASE("focal peak displacement is monotone in sin(theta)") {
    const LensSpec lens = testutil::prod_config().lens;
    double previous = 1e300;
    for (double theta_deg = -15.0; theta_deg <= 15.0; theta_deg += 3.0) {
        const ComplexField focal = propagate_to_focal(deg(theta_deg), lens);
        int argmax = 0;
        focal.samples.cwiseAbs().maxCoeff(&argmax);
        const double x = lens.coord(argmax);
        CHECK(x < previous);
        previous = x;
    }
}

TEST_CASE("doubling the pad factor leaves the normalized focal profile in place") {
    LensSpec lens = testutil::prod_config().lens;
    const ComplexField base = propagate_to_focal(deg(7.0), lens);
    lens.pad_factor *= 2;
    const ComplexField doubled = propagate_to_focal(deg(7.0), lens);
    CHECK(testutil::normalized_profile_distance(base.samples, doubled.samples) < 0.005);
}

TEST_CASE("log_scale accumulates the dropped per-step prefactor magnitude") {
    const LensSpec lens = testutil::prod_config().lens;
    const ComplexField focal = propagate_to_focal(0.0, lens);
    const double per_step = -std::log(lens.wavelength * lens.step);
    CHECK(focal.log_scale == doctest::Approx(lens.focal_steps() * per_step));
}

TEST_CASE("cell-to-sample mapping matches the production index arithmetic") {
    const auto& cfg = testutil::prod_config();
    // 64 half-wavelength cells over a lambda/8 grid: first cell sample 35,
    // last 287 (1-based), all inside 1..320
    CHECK(cell_sample_index(0, cfg.lens, cfg.array) == 34);
    CHECK(cell_sample_index(63, cfg.lens, cfg.array) == 286);
    for (int m = 0; m < cfg.array.num_cells; ++m) {
        const int p = cell_sample_index(m, cfg.lens, cfg.array);
        CHECK(p >= 0);
        CHECK(p < cfg.lens.sample_count());
    }
}

TEST_CASE("single-cell array samples the aperture center") {
    const LensSpec lens = testutil::toy_lens();
    ArraySpec arr;
    arr.num_cells = 1;
    arr.spacing = 0.32;
    CHECK(cell_sample_index(0, lens, arr) == (lens.sample_count() - 1) / 2);
}

TEST_CASE("sampled broadside power is even-symmetric across cells") {
    // Cell spacing an odd multiple of the sample spacing puts every cell on
    // an exact aperture sample, with mirrored cells on mirrored samples.
    // (At half-wavelength spacing every cell sits on an exact half-sample
    // tie, and ties-away-from-zero rounding is not center-symmetric.)
    const LensSpec lens = testutil::prod_config().lens;
    ArraySpec arr;
    arr.num_cells = 64;
    arr.spacing = 3.0 * lens.sample_spacing;
    const ComplexField focal = propagate_to_focal(0.0, lens);
    const Eigen::VectorXcd cells = sample_at_cells(focal, lens, arr);
    const Eigen::VectorXd power = cells.cwiseAbs2();
    const int m = arr.num_cells;
    for (int i = 0; i < m; ++i)
        CHECK(power[i] == doctest::Approx(power[m - 1 - i]).epsilon(1e-6));
}

TEST_CASE("array that overhangs the aperture is rejected") {
    const LensSpec lens = testutil::toy_lens();
    ArraySpec arr;
    arr.num_cells = 30;
    arr.spacing = 0.32; // 29 * 0.32 > 5
    CHECK_THROWS_AS(arr.validate(lens), std::invalid_argument);
}

TEST_SUITE_END();
