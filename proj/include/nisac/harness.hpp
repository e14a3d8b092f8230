// SPDX-License-Identifier: Apache-2.0
//
// nisac: NOMA-inspired ISAC transmit beamforming library
// Copyright (C) 2026 nisac developers
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

#ifndef NISAC_HARNESS_HPP
#define NISAC_HARNESS_HPP

#include "nisac/solver_mu.hpp"
#include "nisac/solver_su.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nisac {

/// Orchestration settings shared by the experiment commands. Every command
/// is deterministic for a fixed (system config, master seed): realization r
/// uses a sub-seed derived from the master seed, results are aggregated in
/// a fixed order, and CSV cells are printed with a fixed format.
struct HarnessOptions {
    SystemConfig system;
    std::vector<Scheme> schemes = {Scheme::noma, Scheme::ideal_senic,
                                   Scheme::no_senic};
    std::vector<double> eps_grid; ///< empty: derived from the scenario
    int realizations = 10;
    std::string out_dir = ".";
    bool plot = false;
    int threads = 0; ///< 0: hardware concurrency
    MuSolveConfig solver; ///< eps1/scheme/q overwritten per record
    double conic_tol_su = 1e-10; ///< single-user programs are small; solve tight
};

struct TradeoffRecord {
    Scheme scheme = Scheme::noma;
    double eps = 0.0;
    std::uint64_t seed = 0;
    double throughput = 0.0;
    double loss = 0.0;
    MuStatus status = MuStatus::subproblem_failed;
    int iters = 0;
    double wall_ms = 0.0; ///< diagnostics only; zeroed in the CSV
};

struct TradeoffCurve {
    std::vector<TradeoffRecord> records;
    bool all_converged() const;
};

/// Mean trade-off grid derived from the scenario: log-spaced between a
/// small fraction and most of the isotropic design's matching loss.
std::vector<double> default_eps_grid(const SystemConfig &cfg,
                                     const BeampatternSpec &spec,
                                     int n_points);

/// Sweeps eps descending per (scheme, realization) with warm starts, solves
/// the scheme family as a chain so constructively-feasible designs propagate
/// between schemes, and writes tradeoff.csv / tradeoff_mean.csv /
/// trace.jsonl (and plots with plot = true).
TradeoffCurve run_tradeoff(const HarnessOptions &options);

/// Beampatterns of every scheme at one cap. With target_throughput > 0 the
/// cap is bisected per scheme until the achieved throughput lands within 1%
/// of the target. Writes beampattern.csv (+ plot).
TradeoffCurve run_beampattern(const HarnessOptions &options,
                              double target_throughput = 0.0);

/// Mean throughput of the NOMA scheme per number of multicast streams.
/// Writes q_sweep.csv.
TradeoffCurve run_q_sweep(const HarnessOptions &options,
                          const std::vector<int> &q_values);

struct SuRunResult {
    std::vector<SuTradeoffRow> rows;
    bool ok = true;
};

/// Single-user trade-off of the three formulations over a rate grid, plus
/// beampatterns at one rate. Forces K = 1. Writes su_tradeoff.csv and
/// su_beampattern.csv.
SuRunResult run_single_user(const HarnessOptions &options, int n_points,
                            double beampattern_rate_bits);

/// One throughput/penalty convergence trace (first realization, one cap).
/// Writes convergence.csv.
TradeoffCurve run_convergence(const HarnessOptions &options);

struct OracleCheckRow {
    double eps2_bits = 0.0;
    double oracle_loss = 0.0;
    double qsdp_loss = 0.0;
    double rel_gap = 0.0;
};

/// Exhaustive-search cross-check of the single-user program at N = 2.
/// Writes oracle_check.csv; rel_gap uses the documented loss floor.
std::vector<OracleCheckRow> run_oracle_check(const HarnessOptions &options,
                                             int resolution);

/// Relative disagreement of two losses with the documented absolute floor
/// (1e-5 of the squared power budget) under which losses count as zero.
double loss_rel_gap(double a, double b, double pt_watts);

} // namespace nisac

#endif
