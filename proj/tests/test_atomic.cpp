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
#include "lensdoa/atomic.hpp"

using namespace lensdoa;
using testutil::deg;

TEST_SUITE_BEGIN("atomic");

TEST_CASE("propagation direction basics") {
    CHECK((propagation_direction(0.0) - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
    const Eigen::Vector3d k30 = propagation_direction(M_PI / 6.0);
    CHECK(k30.x() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(k30.y() == 0.0);
    CHECK(k30.z() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const double theta = rng.uniform(-1.5, 1.5);
        CHECK(propagation_direction(theta).norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("polarization gain closed forms") {
    DipoleSpec d = testutil::unit_dipole();

    // y-oriented dipole is orthogonal to every in-plane direction
    for (double theta : {0.0, deg(10.0), deg(-40.0)})
        CHECK(polarization_gain(theta, d) ==
              doctest::Approx(0.5 * d.mu_eg.squaredNorm()).epsilon(1e-14));

    // dipole parallel to the propagation direction gives zero gain
    d.mu_eg = propagation_direction(deg(25.0));
    CHECK(polarization_gain(deg(25.0), d) == doctest::Approx(0.0).epsilon(1e-14));

    // mu = [1,1,0]/sqrt(2), theta = pi/2 - epsilon: eta -> 1/4
    d.mu_eg = Eigen::Vector3d(1.0, 1.0, 0.0).normalized();
    const double nearly_half_pi = M_PI / 2.0 - 1e-9;
    CHECK(polarization_gain(nearly_half_pi, d) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("polarization gain is invariant under dipole sign flip") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        DipoleSpec d;
        d.mu_eg = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (d.mu_eg.norm() == 0.0)
            continue;
        DipoleSpec flipped = d;
        flipped.mu_eg = -d.mu_eg;
        const double theta = rng.uniform(-1.4, 1.4);
        CHECK(polarization_gain(theta, d) ==
              doctest::Approx(polarization_gain(theta, flipped)).epsilon(1e-14));
    }
}

TEST_CASE("sampled polarizations are unit length and orthogonal to k") {
    Rng rng(17);
    for (double theta : {0.0, deg(10.0), deg(-35.0)}) {
        const Eigen::Vector3d k = propagation_direction(theta);
        for (int i = 0; i < 200; ++i) {
            const Eigen::Vector3d eps = sample_polarization(theta, rng);
            CHECK(std::abs(eps.dot(k)) < 1e-12);
            CHECK(eps.norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("polarization draws are zero-mean with the circular second moment") {
    const double theta = deg(12.0);
    const Eigen::Vector3d k = propagation_direction(theta);
    Rng rng(23);
    const int draws = 100000;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
    for (int i = 0; i < draws; ++i) {
        const Eigen::Vector3d eps = sample_polarization(theta, rng);
        mean += eps;
        second += eps * eps.transpose();
    }
    mean /= draws;
    second /= draws;
    CHECK(mean.norm() < 0.02);
    const Eigen::Matrix3d target =
        0.5 * (Eigen::Matrix3d::Identity() - k * k.transpose());
    CHECK((second - target).norm() < 0.02);
}

TEST_CASE("closed-form gain matches the Monte-Carlo projection average") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        DipoleSpec d;
        d.mu_eg = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (d.mu_eg.norm() < 0.1)
            d.mu_eg = Eigen::Vector3d(1.0, 0.5, -0.2);
        const double theta = rng.uniform(-1.3, 1.3);
        double acc = 0.0;
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            const double proj = d.mu_eg.dot(sample_polarization(theta, rng));
            acc += proj * proj;
        }
        acc /= draws;
        CHECK(acc == doctest::Approx(polarization_gain(theta, d)).epsilon(0.02));
    }
}

TEST_CASE("Rabi to line-splitting conversion and inverse") {
    DipoleSpec d = testutil::unit_dipole();
    CHECK(rabi_to_at_split(0.0, d) == 0.0);
    CHECK(rabi_to_at_split(2.0 * M_PI, d) == doctest::Approx(1.0).epsilon(1e-15));

    d.lambda_c = 0.48e-6;
    d.lambda_p = 0.78e-6;
    Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        const double omega = rng.uniform(0.0, 1e8);
        const double back = at_split_to_rabi(rabi_to_at_split(omega, d), d);
        CHECK(std::abs(back - omega) <= 1e-14 * omega);
    }
    CHECK_THROWS_AS(rabi_to_at_split(-1.0, d), std::invalid_argument);
    CHECK_THROWS_AS(at_split_to_rabi(-1.0, d), std::invalid_argument);
}

TEST_CASE("degenerate dipole specs are rejected") {
    DipoleSpec d;
    d.mu_eg = Eigen::Vector3d::Zero();
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = testutil::unit_dipole();
    d.hbar_scale = 0.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_SUITE_END();
