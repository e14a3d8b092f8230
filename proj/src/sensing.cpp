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

#include "nisac/sensing.hpp"

#include <cmath>
#include <stdexcept>

namespace nisac {

double beampattern_value(const Eigen::MatrixXcd &cov,
                         const Eigen::VectorXcd &steering) {
    if (cov.rows() != cov.cols() || cov.rows() != steering.size()) {
        throw std::invalid_argument("beampattern_value: dimension mismatch");
    }
    const double value = (steering.adjoint() * cov * steering)(0, 0).real();
    const double gate = 1e-9 * std::max(1.0, std::abs(cov.trace().real()));
    if (value < -gate) {
        throw std::runtime_error(
            "beampattern_value: materially negative power, covariance is "
            "not PSD");
    }
    return std::max(value, 0.0);
}

Eigen::VectorXd beampattern(const Eigen::MatrixXcd &cov,
                            const AngleGrid &grid) {
    Eigen::VectorXd out(grid.size());
    for (int l = 0; l < grid.size(); ++l) {
        out(l) = beampattern_value(cov, grid.steering[l]);
    }
    return out;
}

ReferenceSolve solve_reference_covariance(const DesiredPattern &desired,
                                          double pt_watts, double tol) {
    const int n_points = desired.grid.size();
    conic::ConicProgram prog;
    const auto cov = prog.add_hermitian("R", desired.grid.steering[0].size());
    const auto delta = prog.add_nonneg_scalar("delta");
    const auto loss = prog.add_nonneg_scalar("loss");
    prog.add_psd(cov);
    prog.add_eq_zero(prog.trace(cov) - conic::LinExpr(pt_watts));

    std::vector<conic::LinExpr> residuals;
    residuals.reserve(n_points);
    for (int l = 0; l < n_points; ++l) {
        conic::LinExpr r = desired.phi(l) * prog.expr(delta);
        r -= prog.quad_form(desired.grid.steering[l], cov);
        residuals.push_back(std::move(r));
    }
    prog.add_quadratic_upper_bound(
        residuals, static_cast<double>(n_points) * prog.expr(loss));
    prog.minimize(prog.expr(loss));

    const auto res = prog.solve(tol);
    ReferenceSolve out;
    out.status = res.status;
    if (res.status == conic::SolveStatus::optimal) {
        out.cov = res.value(cov);
        out.delta = res.value(delta);
        out.loss = res.objective;
    }
    return out;
}

BeampatternSpec build_beampattern_spec(const SystemConfig &cfg, double tol) {
    const DesiredPattern desired = build_desired_pattern(cfg);
    const double pt = cfg.pt_watts();
    const ReferenceSolve ref = solve_reference_covariance(desired, pt, tol);
    if (ref.status != conic::SolveStatus::optimal) {
        throw std::runtime_error(
            "reference covariance solve failed: " +
            std::string(conic::to_string(ref.status)));
    }
    BeampatternSpec spec;
    spec.grid = desired.grid;
    spec.phi = desired.phi;
    spec.reference_cov = ref.cov;
    spec.reference_pattern = beampattern(ref.cov, desired.grid);
    spec.delta_star = ref.delta;
    spec.reference_loss = ref.loss;
    spec.pt_watts = pt;
    return spec;
}

double matching_loss(const Eigen::MatrixXcd &cov,
                     const BeampatternSpec &spec) {
    if (cov.rows() != spec.reference_cov.rows() ||
        cov.cols() != spec.reference_cov.cols()) {
        throw std::invalid_argument("matching_loss: dimension mismatch");
    }
    double acc = 0.0;
    for (int l = 0; l < spec.grid_size(); ++l) {
        const double diff = spec.reference_pattern(l) -
                            beampattern_value(cov, spec.grid.steering[l]);
        acc += diff * diff;
    }
    return acc / spec.grid_size();
}

} // namespace nisac
