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

#ifndef NISAC_SENSING_HPP
#define NISAC_SENSING_HPP

#include "nisac/conic.hpp"
#include "nisac/scenario.hpp"

#include <Eigen/Dense>

namespace nisac {

/// Desired pattern plus the sensing-only reference solution it induces. The
/// matching loss of every scheme is measured against reference_pattern, the
/// beampattern of the best covariance a sensing-only transmitter can form.
struct BeampatternSpec {
    AngleGrid grid;
    Eigen::VectorXd phi;                ///< desired pattern, entries in {0,1}
    Eigen::MatrixXcd reference_cov;     ///< optimal sensing-only covariance
    Eigen::VectorXd reference_pattern;  ///< its beampattern on the grid
    double delta_star = 0.0;            ///< optimal desired-pattern scaling
    double reference_loss = 0.0;        ///< optimal value of the fit problem
    double pt_watts = 0.0;

    int grid_size() const { return grid.size(); }
};

/// Transmit power toward one direction: a^H R a, clipped at zero after
/// checking the value is not materially negative.
double beampattern_value(const Eigen::MatrixXcd &cov,
                         const Eigen::VectorXcd &steering);

/// Beampattern over a whole grid.
Eigen::VectorXd beampattern(const Eigen::MatrixXcd &cov,
                            const AngleGrid &grid);

struct ReferenceSolve {
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    Eigen::MatrixXcd cov;
    double delta = 0.0;
    double loss = 0.0;
};

/// Sensing-only least-squares fit: minimize the mean squared gap between
/// delta*phi and the covariance beampattern over PSD covariances with
/// tr = pt_watts and delta >= 0.
ReferenceSolve solve_reference_covariance(const DesiredPattern &desired,
                                          double pt_watts, double tol = 1e-8);

/// Convenience: desired pattern + reference solve in one struct.
BeampatternSpec build_beampattern_spec(const SystemConfig &cfg,
                                       double tol = 1e-8);

/// Mean squared deviation from the reference beampattern.
double matching_loss(const Eigen::MatrixXcd &cov, const BeampatternSpec &spec);

} // namespace nisac

#endif
