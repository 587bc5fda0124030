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
#include <optional>
#include <vector>

#include "lensdoa/dictionary.hpp"

namespace lensdoa {

/// Settings for the accelerated proximal-gradient solve of the nonnegative
/// l1-regularized least-squares problem
///   min_{w >= 0}  0.5 ||y - P w||^2 + lambda ||w||_1.
/// Unset lambda resolves to 0.002 * ||P^T y||_inf (scales with the data);
/// unset tol resolves to 1e-8 * max(1, ||y||_2).
struct FistaConfig {
    std::optional<double> lambda_reg;
    std::optional<double> tol;
    int max_iter = 2000;
    double support_tau_rel = 0.01; // support threshold relative to max weight
    // Clusters below this fraction of the heaviest cluster's mass do not
    // count as user detections. A transmit source contributes its whole
    // power as cluster mass, while noise-induced clusters carry a few
    // percent at most; without this floor a single noise bin can mask a
    // genuine under-detection and block the cluster-splitting fallback.
    double mass_floor_rel = 0.1;

    void validate() const;
};

/// Elementwise soft-thresholding: sign(x) * max(|x| - tau, 0).
double soft_threshold(double x, double tau);

/// Raw FISTA output before angle decoding.
struct FistaResult {
    Eigen::VectorXd w;
    std::vector<double> objective_trace;   // value of the composite objective
    std::vector<double> model_error_trace; // ||y - P w||^2
    int iterations = 0;
    bool converged = false;
    double lambda_used = 0.0;
    double tol_used = 0.0;
    double min_iterate = 0.0; // smallest coefficient seen over all iterates
};

/// Run FISTA from w = z = 0 with momentum restarted nowhere (plain
/// accelerated scheme), step 1/L with L taken from the dictionary.
/// Stops when the iterate change drops to tol or max_iter is reached.
FistaResult fista_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                        const FistaConfig& cfg);

/// Indices with weight above support_tau_rel * max(w). `empty_solution` is
/// set when everything is zero.
std::vector<int> detect_support(const Eigen::VectorXd& w, double support_tau_rel,
                                bool* empty_solution = nullptr);

/// Partition a sorted support into maximal runs of adjacent grid bins.
std::vector<std::vector<int>> cluster_support(const std::vector<int>& support);

/// One decoded cluster: grid indices, total mass, power-weighted centroid.
struct Cluster {
    std::vector<int> indices;
    double mass = 0.0;
    double centroid = 0.0;
};

/// Power-weighted centroid and mass per cluster; zero-mass clusters are
/// dropped.
std::vector<Cluster> centroid_decode(const std::vector<std::vector<int>>& clusters,
                                     const Eigen::VectorXd& w, const AoaGrid& grid);

/// Keep the k largest-mass cluster centroids (ties: lower grid index wins),
/// sorted ascending by angle. When fewer than k clusters exist, the largest
/// clusters are split at their weighted-median bins and, as a last resort,
/// centroids are repeated; `under_detection` is flagged in either case.
Eigen::VectorXd select_topk(const std::vector<Cluster>& clusters, int k,
                            const Eigen::VectorXd& w, const AoaGrid& grid,
                            bool* under_detection = nullptr);

/// Full decoded solve: FISTA, support, clustering, centroids, top-k.
struct NnlassoResult {
    Eigen::VectorXd w_hat;
    std::vector<int> support;
    std::vector<Cluster> clusters;
    Eigen::VectorXd angles; // k requested angles, ascending
    std::vector<double> objective_trace;
    std::vector<double> model_error_trace;
    int iterations = 0;
    bool converged = false;
    bool under_detection = false;
    double lambda_used = 0.0;
};

NnlassoResult nnlasso_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                            int num_users, const FistaConfig& cfg = {});

} // namespace lensdoa
