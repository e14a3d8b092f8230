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

#include "nisac/solver_su.hpp"

#include <cmath>
#include <stdexcept>

namespace nisac {

namespace {

void require_single_user(const ChannelSet &ch) {
    if (ch.n_users() != 1) {
        throw std::invalid_argument("single-user solver needs K = 1");
    }
}

// residuals of the pattern fit for a covariance expression assembled from
// one or more matrix variables
std::vector<conic::LinExpr>
pattern_residuals(conic::ConicProgram &prog, const BeampatternSpec &spec,
                  const std::vector<conic::HermitianVar> &parts) {
    std::vector<conic::LinExpr> residuals;
    residuals.reserve(spec.grid_size());
    for (int l = 0; l < spec.grid_size(); ++l) {
        conic::LinExpr r(spec.reference_pattern(l));
        for (const auto &v : parts) {
            r -= prog.quad_form(spec.grid.steering[l], v);
        }
        residuals.push_back(std::move(r));
    }
    return residuals;
}

} // namespace

double su_max_rate_bits(const ChannelSet &ch, double pt_watts) {
    require_single_user(ch);
    return std::log2(1.0 +
                     pt_watts * ch.channels[0].squaredNorm() /
                         ch.noise_power);
}

SuSolve solve_p41(const ChannelSet &ch, const BeampatternSpec &spec,
                  double eps2_bits, double pt_watts, double tol) {
    require_single_user(ch);
    if (eps2_bits < 0.0) {
        throw std::invalid_argument("eps2 must be >= 0");
    }
    const auto &h = ch.channels[0];
    const int n = static_cast<int>(h.size());

    conic::ConicProgram prog;
    auto cov = prog.add_hermitian("Rx", n);
    auto loss = prog.add_nonneg_scalar("loss");
    prog.add_psd(cov);
    prog.add_eq_zero(prog.trace(cov) - conic::LinExpr(pt_watts));
    const double floor = (std::pow(2.0, eps2_bits) - 1.0) * ch.noise_power;
    prog.add_nonneg(prog.quad_form(h, cov) - conic::LinExpr(floor));
    prog.add_quadratic_upper_bound(
        pattern_residuals(prog, spec, {cov}),
        static_cast<double>(spec.grid_size()) * prog.expr(loss));
    prog.minimize(prog.expr(loss));

    const auto res = prog.solve(tol);
    SuSolve out;
    out.status = res.status;
    if (res.status == conic::SolveStatus::optimal) {
        out.total_cov = res.value(cov);
        out.loss = res.objective;
    }
    return out;
}

SuSolve solve_p61(const ChannelSet &ch, const BeampatternSpec &spec,
                  double eps2_bits, double pt_watts, int p, double tol) {
    require_single_user(ch);
    if (p != 0 && p != 1) {
        throw std::invalid_argument("p must be 0 or 1");
    }
    if (eps2_bits < 0.0) {
        throw std::invalid_argument("eps2 must be >= 0");
    }
    const auto &h = ch.channels[0];
    const int n = static_cast<int>(h.size());

    conic::ConicProgram prog;
    auto w = prog.add_hermitian("W", n);
    auto r_cov = prog.add_hermitian("Rr", n);
    auto loss = prog.add_nonneg_scalar("loss");
    prog.add_psd(w);
    prog.add_psd(r_cov);
    prog.add_eq_zero(prog.trace(w) + prog.trace(r_cov) -
                     conic::LinExpr(pt_watts));
    const double gain = std::pow(2.0, eps2_bits) - 1.0;
    conic::LinExpr rate = prog.quad_form(h, w);
    rate -= conic::LinExpr(gain * ch.noise_power);
    if (p == 1) {
        rate -= gain * prog.quad_form(h, r_cov);
    }
    prog.add_nonneg(rate);
    prog.add_quadratic_upper_bound(
        pattern_residuals(prog, spec, {w, r_cov}),
        static_cast<double>(spec.grid_size()) * prog.expr(loss));
    prog.minimize(prog.expr(loss));

    const auto res = prog.solve(tol);
    SuSolve out;
    out.status = res.status;
    if (res.status == conic::SolveStatus::optimal) {
        out.unicast_cov = res.value(w);
        out.sensing_cov = res.value(r_cov);
        out.total_cov = out.unicast_cov + out.sensing_cov;
        out.loss = res.objective;
    }
    return out;
}

std::vector<SuTradeoffRow> sweep_single_user(
    const ChannelSet &ch, const BeampatternSpec &spec,
    const std::vector<double> &eps2_grid, double pt_watts, double tol) {
    require_single_user(ch);
    for (std::size_t i = 1; i < eps2_grid.size(); ++i) {
        if (eps2_grid[i] < eps2_grid[i - 1]) {
            throw std::invalid_argument("eps2 grid must be ascending");
        }
    }
    std::vector<SuTradeoffRow> rows;
    rows.reserve(eps2_grid.size());
    for (double eps2 : eps2_grid) {
        SuTradeoffRow row;
        row.eps2_bits = eps2;
        row.joint = solve_p41(ch, spec, eps2, pt_watts, tol);
        row.split_p0 = solve_p61(ch, spec, eps2, pt_watts, 0, tol);
        row.split_p1 = solve_p61(ch, spec, eps2, pt_watts, 1, tol);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace nisac
