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

#ifndef NISAC_SOLVER_SU_HPP
#define NISAC_SOLVER_SU_HPP

#include "nisac/conic.hpp"
#include "nisac/scenario.hpp"
#include "nisac/sensing.hpp"

#include <vector>

namespace nisac {

/// Result of one single-user design problem. These are convex programs, so
/// an optimal status comes with a global-optimality certificate from the
/// conic backend.
struct SuSolve {
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    Eigen::MatrixXcd total_cov;   ///< transmit covariance
    Eigen::MatrixXcd unicast_cov; ///< W (split formulations only)
    Eigen::MatrixXcd sensing_cov; ///< R_r (split formulations only)
    double loss = 0.0;
};

/// Largest achievable single-user rate in bits/s/Hz at the power budget.
double su_max_rate_bits(const ChannelSet &ch, double pt_watts);

/// Joint-covariance form: minimize the matching loss over PSD covariances
/// meeting the rate floor eps2 with the full budget spent.
SuSolve solve_p41(const ChannelSet &ch, const BeampatternSpec &spec,
                  double eps2_bits, double pt_watts, double tol = 1e-8);

/// Split form with a dedicated sensing covariance; p = 1 means the sensing
/// signal interferes with the unicast receiver, p = 0 means it is removed.
SuSolve solve_p61(const ChannelSet &ch, const BeampatternSpec &spec,
                  double eps2_bits, double pt_watts, int p,
                  double tol = 1e-8);

struct SuTradeoffRow {
    double eps2_bits = 0.0;
    SuSolve joint;    ///< NOMA-style collapse (single covariance)
    SuSolve split_p0; ///< ideal cancellation
    SuSolve split_p1; ///< no cancellation
};

/// Solves the three formulations on an ascending rate grid.
std::vector<SuTradeoffRow> sweep_single_user(
    const ChannelSet &ch, const BeampatternSpec &spec,
    const std::vector<double> &eps2_grid, double pt_watts,
    double tol = 1e-8);

} // namespace nisac

#endif
