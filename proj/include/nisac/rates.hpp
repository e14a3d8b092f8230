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

#ifndef NISAC_RATES_HPP
#define NISAC_RATES_HPP

#include "nisac/scenario.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nisac {

/// Lifted transmit design: unicast covariances W_k, multicast-bearing
/// sensing beams W_{r,q} ordered by decode priority (q = 0 decoded first),
/// and the remaining sensing covariance.
struct BeamformingSolution {
    std::vector<Eigen::MatrixXcd> unicast;
    std::vector<Eigen::MatrixXcd> multicast;
    Eigen::MatrixXcd remaining;

    int n_antennas() const {
        return static_cast<int>(remaining.rows());
    }
    Eigen::MatrixXcd total_covariance() const;
    double total_trace() const;
    /// (tr(W) - lambda_max(W)) / max(tr(W), 1e-12), worst over all beams.
    double worst_rank_one_ratio() const;
};

struct RateReport {
    Eigen::MatrixXd multicast_per_user;    ///< Q x K stream rates
    Eigen::VectorXd multicast;             ///< Q effective (min over users)
    Eigen::VectorXd unicast;               ///< K
    Eigen::MatrixXd multicast_denominator; ///< Q x K, diagnostics
    Eigen::VectorXd unicast_denominator;   ///< K, diagnostics
    double throughput = 0.0;
    std::string scheme;
};

struct EigenSplit {
    std::vector<Eigen::MatrixXcd> beams; ///< q_streams rank-one matrices
    Eigen::MatrixXcd remainder;
};

/// Splits a sensing covariance into its top-Q eigenbeams plus remainder.
/// Eigenvalues are sorted descending; ties are broken deterministically by
/// the phase-normalized eigenvectors. Eigenvalues below rank tolerance give
/// zero beams.
EigenSplit eig_decompose_sensing(const Eigen::MatrixXcd &r_cov, int q_streams);

/// Rates of the NOMA-inspired scheme: SIC decodes multicast streams in
/// order, every user must decode every stream, unicast is decoded last.
RateReport noma_rates(const BeamformingSolution &sol, const ChannelSet &ch);

/// Same structure, but the embedded information only enables SIC: only the
/// unicast sum counts as throughput and multicast fields are cleared.
RateReport noma_senic_rates(const BeamformingSolution &sol,
                            const ChannelSet &ch);

/// Classic dual-function baseline: sensing interference is cancelled
/// (p = 0) or suffered (p = 1) at the unicast receivers.
RateReport senic_rates(const std::vector<Eigen::MatrixXcd> &unicast,
                       const Eigen::MatrixXcd &r_cov, const ChannelSet &ch,
                       int p);

/// Communication-signal-only baseline.
RateReport com_only_rates(const std::vector<Eigen::MatrixXcd> &unicast,
                          const ChannelSet &ch);

/// Single-user rate collapse: (lhs, rhs) of the identity that sums the SIC
/// chain into one log of the effective power ratio. Requires K = 1.
std::pair<double, double>
telescoping_identity_check(const BeamformingSolution &sol,
                           const ChannelSet &ch);

} // namespace nisac

#endif
