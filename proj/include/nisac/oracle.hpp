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
//
// Brute-force verifiers. Everything in this namespace recomputes its target
// quantity with naive scalar loops and never calls into the conic layer or
// the FP machinery, so it can serve as an independent check on both.

#ifndef NISAC_ORACLE_HPP
#define NISAC_ORACLE_HPP

#include "nisac/rates.hpp"
#include "nisac/scenario.hpp"
#include "nisac/sensing.hpp"

#include <cstdint>

namespace nisac::oracle {

/// Exhaustive search over two-antenna covariances
///   R = pt * (u u^H cos^2 psi + u_perp u_perp^H sin^2 psi)
/// with u = (cos a, sin a e^{i phi}). The family covers every trace-pt PSD
/// matrix of side 2 up to a global phase that the phi sweep absorbs (see
/// docs/oracle.md). Returns the best achievable mean-square pattern loss
/// among rate-feasible grid points; an upper bound on the true optimum.
struct GridSearchResult {
    double best_loss = 0.0;
    bool feasible_point_found = false;
};
GridSearchResult grid_search_single_user(const ChannelSet &ch,
                                         const BeampatternSpec &spec,
                                         double eps2_bits, double pt_watts,
                                         int resolution);

/// Independent re-implementation of the NOMA rate chain with scalar loops.
RateReport scalar_rate_reference(const BeamformingSolution &sol,
                                 const ChannelSet &ch);

/// Tightness of the two fractional-programming transforms at their
/// closed-form optimal multipliers, evaluated at one design point:
/// first = |f1(alpha*, theta) - f0(theta)|,
/// second = |h(alpha*, beta*, theta) - g(alpha*, theta)|.
std::pair<double, double>
transform_tightness_at(const ChannelSet &ch, const BeamformingSolution &sol);

/// Max deviations over `trials` random PSD designs drawn from `seed`.
std::pair<double, double> transform_tightness(const ChannelSet &ch,
                                              double pt_watts,
                                              std::uint64_t seed, int trials);

/// Random solution generator shared by the tightness and identity checks.
BeamformingSolution random_solution(int n_antennas, int n_users,
                                    int n_streams, double pt_watts,
                                    std::uint64_t seed);

} // namespace nisac::oracle

#endif
