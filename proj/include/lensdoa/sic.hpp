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
#include <vector>

#include "lensdoa/dictionary.hpp"

namespace lensdoa {

/// Result of the successive-cancellation solve.
struct SicResult {
    Eigen::VectorXd angles;                     // ascending
    std::vector<int> indices;                   // picks in selection order
    std::vector<double> amplitudes;             // fitted weights, >= 0
    std::vector<double> residual_energy_trace;  // ||r||^2 for stages 0..K
    bool early_exhaustion = false;
};

/// Index of the centered atom most aligned with r in cosine similarity,
/// skipping excluded indices. The score keeps its sign (no absolute value);
/// ties break toward the lower index. Throws on a zero residual.
int best_atom(const PowerDictionary& dict, const Eigen::VectorXd& r,
              const std::vector<char>& excluded);

/// Nonnegative scalar least-squares fit of r along p: [p.r / ||p||^2]_+.
/// Throws on a zero atom.
double nn_amplitude(const Eigen::VectorXd& p, const Eigen::VectorXd& r);

/// Greedy pick-fit-subtract over the centered dictionary: for each of
/// num_users stages select the best atom, decode its grid angle, fit a
/// nonnegative amplitude, and cancel it from the residual. If the residual
/// collapses early, remaining picks re-rank the unchosen atoms against the
/// original input and early_exhaustion is flagged.
SicResult sic_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                    int num_users);

} // namespace lensdoa
