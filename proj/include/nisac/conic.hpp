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

#ifndef NISAC_CONIC_HPP
#define NISAC_CONIC_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nisac::conic {

/// Real affine functional over the program's parameter vector. Hermitian
/// matrix variables are parametrized by real scalars (diagonal plus re/im of
/// the lower triangle), so every functional built through the program helpers
/// is real-valued by construction.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    explicit LinExpr(double c) : constant(c) {}

    LinExpr &operator+=(const LinExpr &other);
    LinExpr &operator-=(const LinExpr &other);
    LinExpr &operator*=(double factor);
    friend LinExpr operator+(LinExpr a, const LinExpr &b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr &b) { return a -= b; }
    friend LinExpr operator*(double f, LinExpr e) { return e *= f; }

    /// Merges duplicate indices and drops zero coefficients.
    void compress();
    double eval(const Eigen::VectorXd &x) const;
};

struct ScalarVar {
    int index = -1;
};

struct HermitianVar {
    int id = -1;
    int side = 0;
    int offset = 0; ///< first parameter index in the program's vector
};

enum class SolveStatus {
    optimal,
    infeasible,
    numerical_failure,
    iteration_limit,
};

const char *to_string(SolveStatus status);

struct SolverStats {
    int iterations = 0;       ///< interior-point iterations (all passes)
    int refine_rounds = 0;    ///< exponential-cone refinement passes
    double wall_ms = 0.0;
    double max_violation = 0.0; ///< worst constraint violation at the solution
};

struct SolveResult {
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0; ///< in the sense the objective was set
    Eigen::VectorXd x;      ///< full parameter vector (empty unless optimal)
    SolverStats stats;
    std::string message;

    double value(const ScalarVar &v) const { return x(v.index); }
    Eigen::MatrixXcd value(const HermitianVar &m) const;
};

/// A small conic-program builder over scalar and Hermitian-matrix variables.
/// Supported constraints: linear equalities and inequalities, second-order
/// and rotated second-order cones, PSD cones on matrix variables, and
/// exponential cones (z >= y*exp(x/y)). Backed by an embedded homogeneous
/// self-dual interior-point method; exponential cones are handled through
/// deterministic supporting-hyperplane refinement around that backend.
class ConicProgram {
  public:
    ScalarVar add_scalar(const std::string &name);
    /// Scalar with an attached x >= 0 constraint.
    ScalarVar add_nonneg_scalar(const std::string &name);
    HermitianVar add_hermitian(const std::string &name, int side);

    int num_params() const { return n_params_; }

    // ---- expression builders -------------------------------------------
    LinExpr expr(const ScalarVar &v) const;
    /// a^H X a as a real functional (X Hermitian).
    LinExpr quad_form(const Eigen::VectorXcd &a, const HermitianVar &X) const;
    LinExpr trace(const HermitianVar &X) const;
    /// tr(M X); rejects non-Hermitian M since tr(MX) would not be real.
    LinExpr trace_product(const Eigen::MatrixXcd &M,
                          const HermitianVar &X) const;
    /// Entry accessors for Hermitian variables (i >= j).
    LinExpr entry_re(const HermitianVar &X, int i, int j) const;
    LinExpr entry_im(const HermitianVar &X, int i, int j) const;

    // ---- constraints ----------------------------------------------------
    void add_eq_zero(LinExpr e);
    void add_nonneg(LinExpr e);
    /// ||u||_2 <= t
    void add_soc(const std::vector<LinExpr> &u, LinExpr t);
    /// 2 p q >= ||w||^2 (implies p, q >= 0)
    void add_rsoc(LinExpr p, LinExpr q, const std::vector<LinExpr> &w);
    /// sum_l r_l^2 <= bound, for real residual functionals r_l.
    void add_quadratic_upper_bound(const std::vector<LinExpr> &residuals,
                                   LinExpr bound);
    void add_psd(const HermitianVar &X);
    /// (x, y, z) in the exponential cone: z >= y*exp(x/y), y >= 0.
    /// Optional hints seed supporting hyperplanes at w = x/y values that are
    /// expected to be active; good hints cut refinement rounds to one or two.
    void add_exp_cone(LinExpr x, LinExpr y, LinExpr z,
                      std::vector<double> hint_w = {});

    // ---- objective ------------------------------------------------------
    void maximize(LinExpr objective);
    void minimize(LinExpr objective);

    /// Solves the program. Deterministic for a fixed (program, tol) pair.
    SolveResult solve(double tol = 1e-8) const;

    /// Human-readable listing of variables and constraints, for debugging.
    std::string dump() const;

  private:
    struct SocBlock {
        std::vector<LinExpr> rows; ///< rows[0] is the cone head
    };
    struct ExpCone {
        LinExpr x, y, z;
        std::vector<double> hints;
    };

    friend struct LoweringContext;

    int n_params_ = 0;
    std::vector<std::string> scalar_names_;
    std::vector<ScalarVar> scalars_;
    std::vector<HermitianVar> hermitians_;
    std::vector<std::string> hermitian_names_;

    std::vector<LinExpr> eq_;
    std::vector<LinExpr> nonneg_;
    std::vector<SocBlock> socs_;
    std::vector<int> psd_vars_; ///< ids into hermitians_
    std::vector<ExpCone> exps_;

    LinExpr objective_;  ///< always stored in minimization sense
    bool maximize_ = false;
    bool has_objective_ = false;
};

} // namespace nisac::conic

#endif
