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

#include "lensdoa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lensdoa/csv.hpp"

namespace lensdoa {

namespace {

constexpr std::uint64_t kScenarioStreamTag = 0x5ce7a51000000001ULL;
constexpr std::uint64_t kBatchStreamTag = 0xba7c400000000002ULL;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

} // namespace

std::uint64_t trial_batch_seed(std::uint64_t trial_seed) {
    return mix_seed(trial_seed, kBatchStreamTag);
}

UserConfig draw_scenario(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
    UserConfig users;
    if (cfg.fixed_angles.size() > 0) {
        users.angles = cfg.fixed_angles;
        std::sort(users.angles.begin(), users.angles.end());
        users.powers = Eigen::VectorXd::Ones(users.angles.size());
        return users;
    }

    Rng rng(mix_seed(trial_seed, kScenarioStreamTag));
    const int k = cfg.num_users;
    const double min_sep =
        cfg.min_sep_rad > 0.0 ? cfg.min_sep_rad : 2.0 * cfg.grid_spacing;
    const int max_attempts = 10000;

    Eigen::VectorXd angles(k);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (int i = 0; i < k; ++i)
            angles[i] = rng.uniform(cfg.aoa_min, cfg.aoa_max);
        std::sort(angles.begin(), angles.end());
        bool separated = true;
        if (cfg.min_separation) {
            for (int i = 0; i + 1 < k; ++i)
                if (angles[i + 1] - angles[i] < min_sep) {
                    separated = false;
                    break;
                }
        }
        if (separated) {
            users.angles = angles;
            users.powers = Eigen::VectorXd::Ones(k);
            return users;
        }
    }
    throw std::runtime_error("draw_scenario: separation rejection cap exceeded");
}

std::vector<double> match_and_error(const Eigen::VectorXd& estimated,
                                    const Eigen::VectorXd& truth) {
    const int k = static_cast<int>(truth.size());
    if (estimated.size() != k)
        throw std::invalid_argument("match_and_error: length mismatch");
    if (k > 8)
        throw std::invalid_argument("match_and_error: permutation search caps at 8 users");

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < k; ++i) {
            const double d = estimated[perm[i]] - truth[i];
            cost += d * d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> errors(k);
    for (int i = 0; i < k; ++i) {
        const double d = estimated[best[i]] - truth[i];
        errors[i] = d * d;
    }
    return errors;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const PowerDictionary& dict,
                      std::uint64_t trial_seed) {
    TrialRecord record;
    const UserConfig users = draw_scenario(cfg, trial_seed);
    record.true_angles = users.angles;

    LoConfig lo;
    lo.power = cfg.lo_power_factor * users.powers.sum();
    lo.path_gain = 1.0;
    lo.angle = cfg.lo_angle;

    const ScenarioContext ctx =
        make_scenario_context(users, lo, cfg.lens, cfg.array, cfg.dipole);
    const double snr_linear = std::pow(10.0, cfg.snr_db / 10.0);
    record.sigma_q2 = calibrate_noise(ctx, snr_linear);

    const MeasurementBatch batch =
        simulate_batch(ctx, cfg.num_snapshots, record.sigma_q2,
                       mix_seed(trial_seed, kBatchStreamTag), /*parallel=*/false,
                       cfg.block_fading);
    const Eigen::VectorXd y_perp = center(batch.y_bar);

    const int k = users.count();
    if (cfg.solver == SolverChoice::nnlasso || cfg.solver == SolverChoice::both) {
        SolverOutcome out;
        const auto start = std::chrono::steady_clock::now();
        const NnlassoResult r = nnlasso_solve(dict, y_perp, k, cfg.fista);
        out.wall_ms = elapsed_ms(start);
        out.angles = r.angles;
        out.detection_failure = r.under_detection;
        out.converged = r.converged;
        out.squared_errors = match_and_error(r.angles, users.angles);
        record.nnlasso = std::move(out);
    }
    if (cfg.solver == SolverChoice::sic || cfg.solver == SolverChoice::both) {
        SolverOutcome out;
        const auto start = std::chrono::steady_clock::now();
        const SicResult r = sic_solve(dict, y_perp, k);
        out.wall_ms = elapsed_ms(start);
        out.angles = r.angles;
        out.detection_failure = r.early_exhaustion;
        out.converged = true;
        out.squared_errors = match_and_error(r.angles, users.angles);
        record.sic = std::move(out);
    }
    return record;
}

SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "snr")
        return SweepAxis::snr;
    if (s == "users")
        return SweepAxis::users;
    if (s == "cells")
        return SweepAxis::cells;
    if (s == "aoa")
        return SweepAxis::aoa;
    throw std::invalid_argument("unknown sweep axis '" + s + "' (snr|users|cells|aoa)");
}

std::string to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::snr:
        return "snr";
    case SweepAxis::users:
        return "users";
    case SweepAxis::cells:
        return "cells";
    default:
        return "aoa";
    }
}

ArraySpec fit_array(const LensSpec& lens, int cells, double preferred_spacing) {
    ArraySpec arr;
    arr.num_cells = cells;
    arr.spacing = preferred_spacing;
    // The sample grid spans +-(W - dx)/2, so the outermost cells need that
    // margin, not just the aperture width.
    const double usable = lens.aperture_width - lens.sample_spacing;
    if (cells > 1 && (cells - 1) * arr.spacing > usable)
        arr.spacing = usable / (cells - 1);
    arr.validate(lens);
    return arr;
}

namespace {

struct SolverStats {
    double error_sum = 0.0;
    std::int64_t error_count = 0;
    int failures = 0;
    double wall_sum = 0.0;
    int runs = 0;

    void add(const SolverOutcome& out) {
        for (double e : out.squared_errors)
            error_sum += e;
        error_count += static_cast<std::int64_t>(out.squared_errors.size());
        failures += out.detection_failure ? 1 : 0;
        wall_sum += out.wall_ms;
        ++runs;
    }
};

SweepRow make_row(double axis_value, const std::string& solver, const SolverStats& s) {
    SweepRow row;
    row.axis_value = axis_value;
    row.solver = solver;
    row.rmse_rad = s.error_count > 0 ? std::sqrt(s.error_sum / double(s.error_count)) : 0.0;
    row.detection_failure_rate = s.runs > 0 ? double(s.failures) / double(s.runs) : 0.0;
    row.mean_solver_ms = s.runs > 0 ? s.wall_sum / double(s.runs) : 0.0;
    return row;
}

ExperimentConfig config_for_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                       double value) {
    ExperimentConfig cfg = base;
    switch (axis) {
    case SweepAxis::snr:
        cfg.snr_db = value;
        break;
    case SweepAxis::users:
        cfg.num_users = static_cast<int>(std::llround(value));
        break;
    case SweepAxis::cells:
        cfg.array = fit_array(cfg.lens, static_cast<int>(std::llround(value)),
                              base.array.spacing);
        break;
    case SweepAxis::aoa:
        // One user pinned at the requested angle; fading, polarization and
        // noise stay random across trials.
        cfg.num_users = 1;
        cfg.fixed_angles = Eigen::VectorXd::Constant(1, value);
        break;
    }
    return cfg;
}

} // namespace

SweepResult sweep(const ExperimentConfig& base, SweepAxis axis,
                  const std::vector<double>& values, bool progress) {
    if (values.empty())
        throw std::invalid_argument("sweep: no axis values");
    base.validate();

    SweepResult result;
    result.records.resize(values.size());

    // Focal fields depend only on the lens and grid, so the cells axis can
    // reuse them across dictionary rebuilds.
    const AoaGrid grid = base.make_grid();
    std::vector<ComplexField> fields;

    for (std::size_t ai = 0; ai < values.size(); ++ai) {
        const ExperimentConfig cfg = config_for_axis_value(base, axis, values[ai]);
        cfg.validate();
        if (fields.empty())
            fields = grid_focal_fields(grid, cfg.lens, true);
        const PowerDictionary dict =
            assemble_dictionary(fields, grid, cfg.lens, cfg.array, cfg.dipole);

        auto& records = result.records[ai];
        records.resize(cfg.num_trials);
        std::string failure; // exceptions cannot cross the parallel region
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < cfg.num_trials; ++t) {
            try {
                // Trial seeds deliberately do not involve the axis index:
                // axis values share their scenario and noise draws (common
                // random numbers), so trend comparisons across the axis are
                // paired rather than subject to trial-set luck.
                const std::uint64_t seed =
                    mix_seed(base.master_seed, static_cast<std::uint64_t>(t));
                records[t] = run_trial(cfg, dict, seed);
                records[t].trial_index = t;
            } catch (const std::exception& e) {
#pragma omp critical
                failure = e.what();
            }
        }
        if (!failure.empty())
            throw std::runtime_error("sweep: trial failed: " + failure);

        SolverStats nn, sic_stats;
        for (const TrialRecord& rec : records) {
            if (rec.nnlasso)
                nn.add(*rec.nnlasso);
            if (rec.sic)
                sic_stats.add(*rec.sic);
        }
        if (nn.runs > 0)
            result.rows.push_back(make_row(values[ai], "nnlasso", nn));
        if (sic_stats.runs > 0)
            result.rows.push_back(make_row(values[ai], "sic", sic_stats));

        if (progress)
            std::cerr << "axis " << to_string(axis) << " = " << values[ai] << ": "
                      << cfg.num_trials << " trials done\n";
    }
    return result;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "axis_value,solver,rmse_rad,detection_failure_rate,mean_solver_ms\n";
    for (const SweepRow& r : rows) {
        os << format_double(r.axis_value) << ',' << r.solver << ','
           << format_double(r.rmse_rad) << ',' << format_double(r.detection_failure_rate)
           << ',' << format_double(r.mean_solver_ms) << '\n';
    }
    return os.str();
}

double aggregate_rmse(const std::vector<TrialRecord>& records, SolverChoice solver) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (const TrialRecord& rec : records) {
        const SolverOutcome* out = nullptr;
        if (solver == SolverChoice::nnlasso && rec.nnlasso)
            out = &*rec.nnlasso;
        else if (solver == SolverChoice::sic && rec.sic)
            out = &*rec.sic;
        if (out == nullptr)
            continue;
        for (double e : out->squared_errors)
            sum += e;
        count += static_cast<std::int64_t>(out->squared_errors.size());
    }
    if (count == 0)
        throw std::invalid_argument("aggregate_rmse: no records for that solver");
    return std::sqrt(sum / double(count));
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<BenchRow> runtime_bench(const ExperimentConfig& base,
                                    const std::vector<int>& cell_counts, int repetitions,
                                    bool progress) {
    if (cell_counts.empty())
        throw std::invalid_argument("runtime_bench: no cell counts");
    if (repetitions < 1)
        throw std::invalid_argument("runtime_bench: repetitions must be >= 1");
    base.validate();

    const AoaGrid grid = base.make_grid();
    const std::vector<ComplexField> fields = grid_focal_fields(grid, base.lens, true);

    std::vector<BenchRow> rows;
    for (int cells : cell_counts) {
        ExperimentConfig cfg = base;
        cfg.array = fit_array(cfg.lens, cells, base.array.spacing);
        const PowerDictionary dict =
            assemble_dictionary(fields, grid, cfg.lens, cfg.array, cfg.dipole);

        // A representative observation, fixed across repetitions.
        cfg.validate();
        const UserConfig users = draw_scenario(cfg, mix_seed(cfg.master_seed, 0, 0));
        LoConfig lo;
        lo.power = cfg.lo_power_factor * users.powers.sum();
        lo.angle = cfg.lo_angle;
        const ScenarioContext ctx =
            make_scenario_context(users, lo, cfg.lens, cfg.array, cfg.dipole);
        const double sigma_q2 =
            calibrate_noise(ctx, std::pow(10.0, cfg.snr_db / 10.0));
        const MeasurementBatch batch = simulate_batch(
            ctx, cfg.num_snapshots, sigma_q2, mix_seed(cfg.master_seed, 1, 1), false);
        const Eigen::VectorXd y_perp = center(batch.y_bar);

        // The greedy solve takes microseconds at small M; batch it inside
        // the timer so medians sit well above the clock resolution.
        const int inner = 32;
        std::vector<double> sic_times, nn_iter_times;
        for (int rep = 0; rep < repetitions; ++rep) {
            auto start = std::chrono::steady_clock::now();
            for (int j = 0; j < inner; ++j) {
                const SicResult sr = sic_solve(dict, y_perp, cfg.num_users);
                (void)sr;
            }
            sic_times.push_back(elapsed_ms(start) / double(inner));

            // Fixed-length run isolates the per-iteration cost.
            FistaConfig fista = cfg.fista;
            fista.max_iter = 150;
            fista.tol = std::numeric_limits<double>::denorm_min();
            start = std::chrono::steady_clock::now();
            const FistaResult fr = fista_solve(dict, y_perp, fista);
            nn_iter_times.push_back(elapsed_ms(start) / double(fr.iterations));
        }

        BenchRow sic_row;
        sic_row.cells = cells;
        sic_row.solver = "sic";
        sic_row.median_solve_ms = median(sic_times);
        sic_row.median_per_iter_ms = sic_row.median_solve_ms / double(cfg.num_users);
        rows.push_back(sic_row);

        BenchRow nn_row;
        nn_row.cells = cells;
        nn_row.solver = "nnlasso";
        nn_row.median_per_iter_ms = median(nn_iter_times);
        nn_row.median_solve_ms = nn_row.median_per_iter_ms * 150.0;
        rows.push_back(nn_row);

        if (progress)
            std::cerr << "bench cells = " << cells << " done\n";
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "cells,solver,median_solve_ms,median_per_iter_ms\n";
    for (const BenchRow& r : rows) {
        os << r.cells << ',' << r.solver << ',' << format_double(r.median_solve_ms) << ','
           << format_double(r.median_per_iter_ms) << '\n';
    }
    return os.str();
}

} // namespace lensdoa
