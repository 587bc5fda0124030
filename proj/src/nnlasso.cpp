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

#include "lensdoa/nnlasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lensdoa {

void FistaConfig::validate() const {
    if (lambda_reg.has_value() && !(*lambda_reg >= 0.0))
        throw std::invalid_argument("FistaConfig: lambda must be >= 0");
    if (tol.has_value() && !(*tol > 0.0))
        throw std::invalid_argument("FistaConfig: tol must be positive");
    if (max_iter < 1)
        throw std::invalid_argument("FistaConfig: max_iter must be >= 1");
    if (!(support_tau_rel > 0.0) || !(support_tau_rel < 1.0))
        throw std::invalid_argument("FistaConfig: support_tau_rel must lie in (0,1)");
    if (!(mass_floor_rel >= 0.0) || !(mass_floor_rel < 1.0))
        throw std::invalid_argument("FistaConfig: mass_floor_rel must lie in [0,1)");
}

double soft_threshold(double x, double tau) {
    const double shrunk = std::abs(x) - tau;
    if (shrunk <= 0.0)
        return 0.0;
    return x > 0.0 ? shrunk : -shrunk;
}

FistaResult fista_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                        const FistaConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd& P = dict.centered;
    if (y_perp.size() != P.rows())
        throw std::invalid_argument("fista_solve: observation length mismatch");
    const double L = dict.lipschitz;
    if (!(L > 0.0))
        throw std::invalid_argument("fista_solve: dictionary has no Lipschitz bound");

    FistaResult res;
    res.lambda_used =
        cfg.lambda_reg.value_or(0.002 * (P.transpose() * y_perp).cwiseAbs().maxCoeff());
    res.tol_used = cfg.tol.value_or(1e-8 * std::max(1.0, y_perp.norm()));

    const int d = static_cast<int>(P.cols());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd z = w;
    double momentum = 1.0;

    auto model_error = [&](const Eigen::VectorXd& v) {
        return (y_perp - P * v).squaredNorm();
    };
    auto objective = [&](const Eigen::VectorXd& v) {
        return 0.5 * model_error(v) + res.lambda_used * v.lpNorm<1>();
    };

    res.objective_trace.push_back(objective(w));
    res.model_error_trace.push_back(model_error(w));
    res.min_iterate = 0.0;

    const double shrink = res.lambda_used / L;
    Eigen::VectorXd w_next(d), grad(d), resid(P.rows());

    for (int t = 0; t < cfg.max_iter; ++t) {
        resid = P * z - y_perp;
        grad = P.transpose() * resid;
        w_next = z - grad / L;
        for (int i = 0; i < d; ++i)
            w_next[i] = std::max(soft_threshold(w_next[i], shrink), 0.0);

        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double coef = (momentum - 1.0) / momentum_next;
        const double change = (w_next - w).norm();

        z = w_next + coef * (w_next - w);
        w.swap(w_next);
        momentum = momentum_next;

        res.min_iterate = std::min(res.min_iterate, w.minCoeff());
        res.objective_trace.push_back(objective(w));
        res.model_error_trace.push_back(model_error(w));
        res.iterations = t + 1;

        if (change <= res.tol_used) {
            res.converged = true;
            break;
        }
    }
    res.w = std::move(w);
    return res;
}

std::vector<int> detect_support(const Eigen::VectorXd& w, double support_tau_rel,
                                bool* empty_solution) {
    const double tau = support_tau_rel * w.maxCoeff();
    std::vector<int> support;
    for (int i = 0; i < w.size(); ++i)
        if (w[i] > tau)
            support.push_back(i);
    if (empty_solution != nullptr)
        *empty_solution = support.empty();
    return support;
}

std::vector<std::vector<int>> cluster_support(const std::vector<int>& support) {
    std::vector<std::vector<int>> clusters;
    for (int idx : support) {
        if (clusters.empty() || idx != clusters.back().back() + 1)
            clusters.emplace_back();
        clusters.back().push_back(idx);
    }
    return clusters;
}

std::vector<Cluster> centroid_decode(const std::vector<std::vector<int>>& clusters,
                                     const Eigen::VectorXd& w, const AoaGrid& grid) {
    std::vector<Cluster> out;
    for (const auto& indices : clusters) {
        if (indices.empty())
            continue;
        double mass = 0.0;
        double weighted = 0.0;
        for (int i : indices) {
            mass += w[i];
            weighted += grid[i] * w[i];
        }
        if (!(mass > 0.0))
            continue; // degenerate cluster, nothing to decode
        out.push_back({indices, mass, weighted / mass});
    }
    return out;
}

namespace {

// Split a cluster at its weighted-median bin; both halves stay nonempty.
std::pair<Cluster, Cluster> split_cluster(const Cluster& c, const Eigen::VectorXd& w,
                                          const AoaGrid& grid) {
    const int n = static_cast<int>(c.indices.size());
    double cum = 0.0;
    int split = 0;
    for (int j = 0; j < n; ++j) {
        cum += w[c.indices[j]];
        if (cum >= 0.5 * c.mass) {
            split = j;
            break;
        }
    }
    split = std::min(split, n - 2);
    std::vector<int> left(c.indices.begin(), c.indices.begin() + split + 1);
    std::vector<int> right(c.indices.begin() + split + 1, c.indices.end());
    auto decode_one = [&](std::vector<int> idx) {
        auto v = centroid_decode({std::move(idx)}, w, grid);
        return v.front();
    };
    return {decode_one(std::move(left)), decode_one(std::move(right))};
}

void sort_by_mass(std::vector<Cluster>& clusters) {
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.mass != b.mass)
            return a.mass > b.mass;
        return a.indices.front() < b.indices.front(); // deterministic tie-break
    });
}

} // namespace

Eigen::VectorXd select_topk(const std::vector<Cluster>& clusters, int k,
                            const Eigen::VectorXd& w, const AoaGrid& grid,
                            bool* under_detection) {
    if (k < 1)
        throw std::invalid_argument("select_topk: k must be >= 1");
    std::vector<Cluster> work = clusters;
    sort_by_mass(work);

    const bool under = static_cast<int>(work.size()) < k;
    if (under_detection != nullptr)
        *under_detection = under;

    // Under-detection: split the heaviest splittable clusters first, then
    // pad by repeating centroids.
    while (static_cast<int>(work.size()) < k) {
        auto it = std::find_if(work.begin(), work.end(),
                               [](const Cluster& c) { return c.indices.size() >= 2; });
        if (it == work.end())
            break;
        Cluster big = *it;
        work.erase(it);
        auto [left, right] = split_cluster(big, w, grid);
        work.push_back(left);
        work.push_back(right);
        sort_by_mass(work);
    }
    if (work.empty()) {
        // All-zero solution: fall back to the grid midpoint so the harness
        // can still score the trial; the flag reports the failure.
        Cluster mid;
        mid.indices = {grid.size() / 2};
        mid.mass = 0.0;
        mid.centroid = grid[grid.size() / 2];
        work.push_back(mid);
    }
    const std::size_t base = work.size();
    for (std::size_t next = 0; static_cast<int>(work.size()) < k; ++next)
        work.push_back(work[next % base]); // repeat heaviest centroids

    Eigen::VectorXd angles(k);
    for (int i = 0; i < k; ++i)
        angles[i] = work[i].centroid;
    std::sort(angles.begin(), angles.end());
    return angles;
}

NnlassoResult nnlasso_solve(const PowerDictionary& dict, const Eigen::VectorXd& y_perp,
                            int num_users, const FistaConfig& cfg) {
    FistaResult fista = fista_solve(dict, y_perp, cfg);

    NnlassoResult res;
    res.objective_trace = std::move(fista.objective_trace);
    res.model_error_trace = std::move(fista.model_error_trace);
    res.iterations = fista.iterations;
    res.converged = fista.converged;
    res.lambda_used = fista.lambda_used;

    bool empty = false;
    res.support = detect_support(fista.w, cfg.support_tau_rel, &empty);
    res.clusters = centroid_decode(cluster_support(res.support), fista.w, dict.grid);

    // Only clusters carrying a meaningful share of the recovered power count
    // as detections; the rest would otherwise mask under-detection.
    double max_mass = 0.0;
    for (const Cluster& c : res.clusters)
        max_mass = std::max(max_mass, c.mass);
    std::vector<Cluster> detections;
    for (const Cluster& c : res.clusters)
        if (c.mass >= cfg.mass_floor_rel * max_mass)
            detections.push_back(c);

    bool under = false;
    res.angles = select_topk(detections, num_users, fista.w, dict.grid, &under);
    res.under_detection = under || empty;
    res.w_hat = std::move(fista.w);
    return res;
}

} // namespace lensdoa
