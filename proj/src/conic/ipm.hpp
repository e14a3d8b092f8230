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
// Embedded cone LP solver:
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,  s in K
//
// where K is a product of nonnegative, second-order, and (real symmetric,
// svec-packed) positive-semidefinite cones. Homogeneous self-dual embedding
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector, following
// the standard formulations used by ECOS and CVXOPT's conelp. Dense linear
// algebra throughout; the KKT system is solved by Schur complement with
// static regularization and iterative refinement.

#ifndef NISAC_CONIC_IPM_HPP
#define NISAC_CONIC_IPM_HPP

#include <Eigen/Dense>
#include <vector>

namespace nisac::conic::detail {

struct ConeDims {
    int nonneg = 0;
    std::vector<int> soc; ///< dimensions (>= 1 each)
    std::vector<int> psd; ///< matrix side lengths

    int total_dim() const;
    int degree() const;
};

enum class IpmStatus {
    optimal,
    primal_infeasible,
    dual_infeasible,
    iteration_limit,
    numerical_problems,
};

struct IpmSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol_inacc = 1e-4;
    double abstol_inacc = 5e-5;
    double reltol_inacc = 5e-5;
    int max_iterations = 100;
    int equil_iterations = 3;
    double step_fraction = 0.99;
    double reg = 1e-11;
};

struct IpmResult {
    IpmStatus status = IpmStatus::numerical_problems;
    Eigen::VectorXd x, y, z, s;
    double pcost = 0.0;
    double dcost = 0.0;
    double gap = 0.0;
    double pres = 0.0;
    double dres = 0.0;
    int iterations = 0;
    bool close_to = false; ///< reached only reduced accuracy
};

IpmResult solve_conelp(const Eigen::VectorXd &c, const Eigen::MatrixXd &A,
                       const Eigen::VectorXd &b, const Eigen::MatrixXd &G,
                       const Eigen::VectorXd &h, const ConeDims &dims,
                       const IpmSettings &settings = {});

// svec packing for side-m symmetric matrices: column-major lower triangle,
// off-diagonal entries scaled by sqrt(2) so that svec(X)'svec(Y) = tr(XY).
int svec_len(int m);
void svec_to_mat(const Eigen::VectorXd &v, int offset, Eigen::MatrixXd &M);
void mat_to_svec(const Eigen::MatrixXd &M, Eigen::VectorXd &v, int offset);

} // namespace nisac::conic::detail

#endif
