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

#include "lensdoa/sic.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lensdoa {

int best_atom(const PowerDictionary& dict, const Eigen::VectorXd& r,
              const std::vector<char>& excluded) {
    const double r_norm = r.norm();
    if (!(r_norm > 0.0))
        throw std::invalid_argument("best_atom: zero residual");
    if (static_cast<int>(excluded.size()) != dict.num_atoms())
        throw std::invalid_argument("best_atom: exclusion mask size mismatch");

    // Sign-aware cosine similarity; anticorrelated atoms score negative.
    const Eigen::VectorXd correlations = dict.centered.transpose() * r;
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dict.num_atoms(); ++i) {
        if (excluded[i])
            continue;
        const double score = correlations[i] / (dict.centered_norms[i] * r_norm);
        if (score > best_score) { // strict: ties keep the lower index
            best_score = score;
            best = i;
        }
    }
    if (best < 0)
        throw std::invalid_argument("best_atom: every atom is excluded");
    return best;
}

double nn_amplitude(const Eigen::VectorXd& p, const Eigen::VectorXd& r) {
    const double p2 = p.squaredNorm();
    if (!(p2 > 0.0))
        throw std::invalid_argument("nn_amplitude: zero atom");
    return std::max(p.dot(r) / p2, 0.0);
}

SicResult sic_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                    int num_users) {
    if (num_users < 1)
        throw std::invalid_argument("sic_solve: need at least one user");
    if (num_users > dict.num_atoms())
        throw std::invalid_argument("sic_solve: more users than dictionary atoms");
    if (y_perp.size() != dict.num_cells())
        throw std::invalid_argument("sic_solve: observation length mismatch");

    SicResult res;
    if (!(y_perp.norm() > 0.0)) {
        // Nothing to match against: report grid-midpoint picks and flag it.
        res.early_exhaustion = true;
        res.angles.resize(num_users);
        res.residual_energy_trace.assign(static_cast<std::size_t>(num_users) + 1, 0.0);
        for (int i = 0; i < num_users; ++i) {
            const int idx = (dict.num_atoms() / 2 + i) % dict.num_atoms();
            res.indices.push_back(idx);
            res.amplitudes.push_back(0.0);
            res.angles[i] = dict.grid[idx];
        }
        std::sort(res.angles.begin(), res.angles.end());
        return res;
    }

    std::vector<char> excluded(dict.num_atoms(), 0);
    Eigen::VectorXd r = y_perp;
    const double degenerate = 1e-12 * y_perp.norm();

    res.residual_energy_trace.push_back(r.squaredNorm());
    for (int stage = 0; stage < num_users; ++stage) {
        int pick;
        double amplitude;
        if (r.norm() > degenerate && !res.early_exhaustion) {
            pick = best_atom(dict, r, excluded);
            amplitude = nn_amplitude(dict.centered.col(pick), r);
            r -= amplitude * dict.centered.col(pick);
        } else {
            // Residual exhausted: rank remaining atoms against the original
            // observation instead and keep going so the caller still gets
            // num_users angles.
            res.early_exhaustion = true;
            pick = best_atom(dict, y_perp, excluded);
            amplitude = nn_amplitude(dict.centered.col(pick), r);
        }
        excluded[pick] = 1;
        res.indices.push_back(pick);
        res.amplitudes.push_back(amplitude);
        res.residual_energy_trace.push_back(r.squaredNorm());
    }

    res.angles.resize(num_users);
    for (int i = 0; i < num_users; ++i)
        res.angles[i] = dict.grid[res.indices[i]];
    std::sort(res.angles.begin(), res.angles.end());
    return res;
}

} // namespace lensdoa
