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

#ifndef NISAC_FP_CORE_HPP
#define NISAC_FP_CORE_HPP

#include "nisac/conic.hpp"
#include "nisac/rates.hpp"
#include "nisac/scenario.hpp"
#include "nisac/sensing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nisac {

enum class Scheme { noma, noma_senic, ideal_senic, no_senic, com_only };

const char *to_string(Scheme scheme);
Scheme scheme_from_string(const std::string &name);

/// How the concave log in the multicast rate bound enters the subproblem:
/// through an exponential cone, or through a touching inverse-tangent lower
/// bound in rotated-SOC form (for backends without exponential cones; it
/// restricts the feasible set, so descent-style guarantees are kept).
enum class LogMode { exp_cone, soc_tangent };

struct FpOptions {
    LogMode log_mode = LogMode::soc_tangent;
    /// Optional minimum rate for SIC-only embedded streams (noma_senic).
    double senic_rate_floor = 0.0;
    /// ideal_senic only: drop the sensing covariance variable entirely.
    bool force_zero_sensing = false;
    double conic_tol = 1e-8;
};

/// Block-coordinate state: multipliers, the current design, the multicast
/// rate auxiliaries, and the rank-one penalty weight.
struct FpState {
    Scheme scheme = Scheme::noma;
    Eigen::VectorXd alpha; ///< K, >= 0
    Eigen::VectorXd beta;  ///< K, >= 0
    BeamformingSolution theta;
    Eigen::VectorXd rate_aux; ///< multicast rate auxiliaries, >= 0
    double zeta = 100.0;
};

/// Closed-form multiplier update: alpha_k is the unicast SINR at theta.
Eigen::VectorXd update_alpha(const FpState &state, const ChannelSet &ch);

/// Closed-form quadratic-transform update; requires alpha already updated.
Eigen::VectorXd update_beta(const FpState &state, const ChannelSet &ch);

/// Throughput the scheme actually counts (used for the inner stop test).
double scheme_throughput(Scheme scheme, const BeamformingSolution &theta,
                         const ChannelSet &ch);

RateReport scheme_rates(Scheme scheme, const BeamformingSolution &theta,
                        const ChannelSet &ch);

/// Rank-one penalty: sum of (nuclear - spectral) norms over the beams the
/// scheme requires to be rank-one. Zero iff every such beam has rank <= 1.
double rank_one_penalty(Scheme scheme, const BeamformingSolution &theta);

/// uu^H for the principal eigenvector (zero matrix for a zero input);
/// deterministic tie-breaks shared with eig_decompose_sensing.
Eigen::MatrixXcd principal_projector(const Eigen::MatrixXcd &w);

/// f2 = sum of rate auxiliaries + v(alpha) + h(alpha, beta, theta).
double fp_objective_f2(const FpState &state, const ChannelSet &ch);

struct Subproblem {
    conic::ConicProgram program;
    std::vector<conic::HermitianVar> unicast_vars;
    std::vector<conic::HermitianVar> multicast_vars;
    std::optional<conic::HermitianVar> remaining_var;
    std::vector<conic::ScalarVar> rate_aux_vars;
};

/// Builds the convex inner problem around the expansion point state.theta:
/// the FP objective with fixed (alpha, beta), SCA bounds on the multicast
/// rates, the linearized rank-one penalty weighted by 1/zeta, the pattern
/// error cap, the exact power budget, and PSD constraints.
Subproblem build_subproblem(const FpState &state, const ChannelSet &ch,
                            const BeampatternSpec &spec, double eps1,
                            const FpOptions &options = {});

struct SubproblemSolution {
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    BeamformingSolution theta;
    Eigen::VectorXd rate_aux;
    double conic_objective = 0.0;
    double wall_ms = 0.0;
};

SubproblemSolution solve_subproblem(const Subproblem &sub, int n_antennas,
                                    double tol);

} // namespace nisac

#endif
