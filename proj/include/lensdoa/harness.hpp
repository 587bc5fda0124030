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

#include <optional>
#include <string>
#include <vector>

#include "lensdoa/config.hpp"
#include "lensdoa/measurement.hpp"
#include "lensdoa/nnlasso.hpp"
#include "lensdoa/sic.hpp"

namespace lensdoa {

/// Per-solver outcome of one trial.
struct SolverOutcome {
    Eigen::VectorXd angles;            // ascending
    std::vector<double> squared_errors; // matched per-user squared errors
    double wall_ms = 0.0;
    bool detection_failure = false; // under-detection / early exhaustion
    bool converged = true;          // FISTA iteration-limit flag (true for SIC)
};

/// Everything recorded for one Monte-Carlo trial.
struct TrialRecord {
    int trial_index = 0;
    Eigen::VectorXd true_angles; // ascending
    double sigma_q2 = 0.0;
    std::optional<SolverOutcome> nnlasso;
    std::optional<SolverOutcome> sic;
};

/// Draw a scenario: num_users angles i.i.d. uniform on the configured range,
/// redrawn (up to 10^4 attempts) until every pair is min_sep_rad apart when
/// min_separation is on. Unit powers. Honors cfg.fixed_angles.
UserConfig draw_scenario(const ExperimentConfig& cfg, std::uint64_t trial_seed);

/// Squared estimation errors under the bijective assignment that minimizes
/// their sum, found by exhaustive permutation search (lengths up to 8).
std::vector<double> match_and_error(const Eigen::VectorXd& estimated,
                                    const Eigen::VectorXd& truth);

/// One full trial: scenario, SNR-calibrated noise, snapshot batch,
/// centering, selected solver(s), assignment. Solver flags are recorded,
/// never thrown.
TrialRecord run_trial(const ExperimentConfig& cfg, const PowerDictionary& dict,
                      std::uint64_t trial_seed);

/// Seed of the snapshot sub-stream run_trial uses for a given trial seed
/// (exposed so trace exports can reproduce the exact batch).
std::uint64_t trial_batch_seed(std::uint64_t trial_seed);

enum class SweepAxis { snr, users, cells, aoa };

SweepAxis parse_sweep_axis(const std::string& s);
std::string to_string(SweepAxis a);

/// One output row of a sweep.
struct SweepRow {
    double axis_value = 0.0;
    std::string solver;
    double rmse_rad = 0.0;
    double detection_failure_rate = 0.0;
    double mean_solver_ms = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // Raw records per axis value, in axis order, for audits and tests.
    std::vector<std::vector<TrialRecord>> records;
};

/// Monte-Carlo sweep over one axis. Trials parallelize over OpenMP with
/// per-trial seeds mix(master, trial_index) shared across axis values
/// (common random numbers, so trend comparisons are paired); aggregation
/// runs in index order so the output does not depend on the thread count.
/// The cells axis rebuilds the dictionary per value (shrinking the cell
/// spacing when needed to keep the array inside the aperture); the aoa axis
/// pins a single user at the given angle.
SweepResult sweep(const ExperimentConfig& cfg, SweepAxis axis,
                  const std::vector<double>& values, bool progress = false);

/// Render sweep rows as CSV (header + one row per (axis value, solver)).
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Aggregate RMSE over records for one solver, per the pooled
/// root-mean-square over trials and users.
double aggregate_rmse(const std::vector<TrialRecord>& records, SolverChoice solver);

struct BenchRow {
    int cells = 0;
    std::string solver;
    double median_solve_ms = 0.0;
    double median_per_iter_ms = 0.0;
};

/// Median solver wall time per array size, dictionary build excluded.
/// Per-iteration cost for the iterative solver comes from a fixed-length
/// run; the greedy solver's per-stage cost divides by the user count.
std::vector<BenchRow> runtime_bench(const ExperimentConfig& cfg,
                                    const std::vector<int>& cell_counts,
                                    int repetitions = 20, bool progress = false);

std::string bench_csv(const std::vector<BenchRow>& rows);

/// Adjust the array spec so (M-1) * spacing fits the aperture, shrinking
/// the spacing when necessary.
ArraySpec fit_array(const LensSpec& lens, int cells, double preferred_spacing);

} // namespace lensdoa
