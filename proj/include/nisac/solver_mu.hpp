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

#ifndef NISAC_SOLVER_MU_HPP
#define NISAC_SOLVER_MU_HPP

#include "nisac/fp_core.hpp"

#include <optional>
#include <vector>

namespace nisac {

/// Double-layer driver settings. Defaults follow the reference experiment
/// setup: zeta shrinks by rho per outer round until the rank-one penalty
/// falls below tau2; the inner loop stops when the throughput stalls.
struct MuSolveConfig {
    double eps1 = 1e-3;     ///< beampattern error cap (absolute, watts^2)
    int q_streams = 1;      ///< multicast-bearing sensing beams
    double zeta0 = 100.0;
    double rho = 0.2;
    double tau1 = 1e-2;
    double tau2 = 1e-4;
    int max_inner = 50;
    int max_outer = 12;
    Scheme scheme = Scheme::noma;
    FpOptions fp;
    std::optional<BeamformingSolution> warm_start;

    void validate() const;
};

enum class MuStatus {
    converged,
    iteration_cap,     ///< outer budget exhausted with penalty above tau2
    subproblem_failed, ///< conic backend gave up; partial trace returned
    repair_failed,     ///< rank-one extraction broke the error cap for good
};

const char *to_string(MuStatus status);

struct TraceRow {
    int outer = 0;
    int inner = 0;
    double throughput = 0.0;          ///< scheme throughput at the iterate
    double penalty = 0.0;             ///< rank-one penalty at the iterate
    double f2 = 0.0;                  ///< FP objective at (alpha, beta, theta)
    double penalized_objective = 0.0; ///< throughput - penalty / zeta
    conic::SolveStatus subproblem_status = conic::SolveStatus::optimal;
    double wall_ms = 0.0;
};

struct SolveTrace {
    MuStatus status = MuStatus::subproblem_failed;
    std::vector<TraceRow> rows;
    BeamformingSolution solution;
    RateReport report;
    double final_loss = 0.0;
    double final_penalty = 0.0;
    double eps1 = 0.0;
    Scheme scheme = Scheme::noma;
    int total_outer = 0;
    int total_inner = 0;
    double wall_ms = 0.0;
};

/// Feasible start: blends a matched-filter communication design toward the
/// zero-loss sensing split until the pattern-error cap holds; bisection on
/// the blend weight. Layout (beams, remainder, zeros) follows the scheme.
FpState initialize(const ChannelSet &ch, const BeampatternSpec &spec,
                   const MuSolveConfig &cfg);

/// The double-layer solver. Handles all five schemes; benchmarks reuse the
/// same loop with scheme-specific blocks removed.
SolveTrace solve_mu(const ChannelSet &ch, const BeampatternSpec &spec,
                    const MuSolveConfig &cfg);

/// Maps a finished design between scheme layouts along the constructive
/// feasibility arguments: a sensing covariance splits into eigenbeams plus
/// remainder toward the NOMA family, and beams merge back the other way.
BeamformingSolution convert_layout(const BeamformingSolution &sol,
                                   Scheme from, Scheme to, int q_streams);

/// Runs the solver from the default start and, when given, from an extra
/// warm start; returns the run with the higher final throughput (default
/// start wins ties). The extra start is typically another scheme's solution
/// mapped through convert_layout.
SolveTrace solve_mu_best(const ChannelSet &ch, const BeampatternSpec &spec,
                         MuSolveConfig cfg,
                         const std::optional<BeamformingSolution>
                             &extra_start = std::nullopt);

/// Scheme design at zero matching loss: the eigensplit of the reference
/// covariance in the scheme's variable layout; unicast beams all zero
/// (com_only splits the reference covariance across its unicast slots).
BeamformingSolution sensing_endpoint(const ChannelSet &ch,
                                     const BeampatternSpec &spec,
                                     Scheme scheme, int q_streams);

/// Re-checks every constraint of the epsilon-constrained design problem on
/// a finished solution; returns the worst violation measures.
struct FeasibilityReport {
    double loss_excess = 0.0;      ///< matching_loss - eps1 (positive = bad)
    double power_gap = 0.0;        ///< |trace - pt|
    double min_eigenvalue = 0.0;   ///< most negative eigenvalue over blocks
    double rank_one_ratio = 0.0;   ///< worst beam ratio
};
FeasibilityReport check_feasibility(const BeamformingSolution &sol,
                                    const BeampatternSpec &spec, double eps1);

} // namespace nisac

#endif
