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

#include "nisac/conic.hpp"

#include "ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nisac::conic {

LinExpr &LinExpr::operator+=(const LinExpr &other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    constant += other.constant;
    return *this;
}

LinExpr &LinExpr::operator-=(const LinExpr &other) {
    for (const auto &[idx, coeff] : other.terms) {
        terms.emplace_back(idx, -coeff);
    }
    constant -= other.constant;
    return *this;
}

LinExpr &LinExpr::operator*=(double factor) {
    for (auto &[idx, coeff] : terms) {
        (void)idx;
        coeff *= factor;
    }
    constant *= factor;
    return *this;
}

void LinExpr::compress() {
    std::map<int, double> merged;
    for (const auto &[idx, coeff] : terms) {
        merged[idx] += coeff;
    }
    terms.clear();
    for (const auto &[idx, coeff] : merged) {
        if (coeff != 0.0) {
            terms.emplace_back(idx, coeff);
        }
    }
}

double LinExpr::eval(const Eigen::VectorXd &x) const {
    double v = constant;
    for (const auto &[idx, coeff] : terms) {
        v += coeff * x(idx);
    }
    return v;
}

const char *to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::numerical_failure:
        return "numerical-failure";
    case SolveStatus::iteration_limit:
        return "iteration-limit";
    }
    return "unknown";
}

Eigen::MatrixXcd SolveResult::value(const HermitianVar &m) const {
    Eigen::MatrixXcd X(m.side, m.side);
    int idx = m.offset;
    for (int i = 0; i < m.side; ++i) {
        X(i, i) = x(idx++);
    }
    for (int j = 0; j < m.side; ++j) {
        for (int i = j + 1; i < m.side; ++i) {
            const double re = x(idx++);
            const double im = x(idx++);
            X(i, j) = std::complex<double>(re, im);
            X(j, i) = std::complex<double>(re, -im);
        }
    }
    return X;
}

ScalarVar ConicProgram::add_scalar(const std::string &name) {
    ScalarVar v{n_params_++};
    scalar_names_.push_back(name);
    scalars_.push_back(v);
    return v;
}

ScalarVar ConicProgram::add_nonneg_scalar(const std::string &name) {
    ScalarVar v = add_scalar(name);
    add_nonneg(expr(v));
    return v;
}

HermitianVar ConicProgram::add_hermitian(const std::string &name, int side) {
    if (side < 1) {
        throw std::invalid_argument("hermitian variable needs side >= 1");
    }
    HermitianVar v;
    v.id = static_cast<int>(hermitians_.size());
    v.side = side;
    v.offset = n_params_;
    n_params_ += side * side;
    hermitians_.push_back(v);
    hermitian_names_.push_back(name);
    return v;
}

LinExpr ConicProgram::expr(const ScalarVar &v) const {
    LinExpr e;
    e.terms.emplace_back(v.index, 1.0);
    return e;
}

namespace {

// Parameter layout of a Hermitian variable: side diagonal entries, then
// (re, im) pairs of the strictly-lower triangle in column-major order.
int lower_pair_offset(const HermitianVar &X, int i, int j) {
    // position of pair (i, j), i > j, among strictly-lower entries
    int count = 0;
    for (int c = 0; c < j; ++c) {
        count += X.side - 1 - c;
    }
    count += i - j - 1;
    return X.offset + X.side + 2 * count;
}

} // namespace

LinExpr ConicProgram::quad_form(const Eigen::VectorXcd &a,
                                const HermitianVar &X) const {
    if (a.size() != X.side) {
        throw std::invalid_argument("quad_form: vector length mismatch");
    }
    LinExpr e;
    for (int i = 0; i < X.side; ++i) {
        e.terms.emplace_back(X.offset + i, std::norm(a(i)));
    }
    for (int j = 0; j < X.side; ++j) {
        for (int i = j + 1; i < X.side; ++i) {
            const std::complex<double> c = std::conj(a(i)) * a(j);
            const int off = lower_pair_offset(X, i, j);
            e.terms.emplace_back(off, 2.0 * c.real());
            e.terms.emplace_back(off + 1, -2.0 * c.imag());
        }
    }
    e.compress();
    return e;
}

LinExpr ConicProgram::trace(const HermitianVar &X) const {
    LinExpr e;
    for (int i = 0; i < X.side; ++i) {
        e.terms.emplace_back(X.offset + i, 1.0);
    }
    return e;
}

LinExpr ConicProgram::trace_product(const Eigen::MatrixXcd &M,
                                    const HermitianVar &X) const {
    if (M.rows() != X.side || M.cols() != X.side) {
        throw std::invalid_argument("trace_product: dimension mismatch");
    }
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-12 *
            std::max(1.0, M.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument(
            "trace_product: M must be Hermitian for tr(MX) to be real");
    }
    LinExpr e;
    for (int i = 0; i < X.side; ++i) {
        e.terms.emplace_back(X.offset + i, M(i, i).real());
    }
    for (int j = 0; j < X.side; ++j) {
        for (int i = j + 1; i < X.side; ++i) {
            const int off = lower_pair_offset(X, i, j);
            e.terms.emplace_back(off, 2.0 * M(j, i).real());
            e.terms.emplace_back(off + 1, -2.0 * M(j, i).imag());
        }
    }
    e.compress();
    return e;
}

LinExpr ConicProgram::entry_re(const HermitianVar &X, int i, int j) const {
    LinExpr e;
    if (i == j) {
        e.terms.emplace_back(X.offset + i, 1.0);
    } else if (i > j) {
        e.terms.emplace_back(lower_pair_offset(X, i, j), 1.0);
    } else {
        e.terms.emplace_back(lower_pair_offset(X, j, i), 1.0);
    }
    return e;
}

LinExpr ConicProgram::entry_im(const HermitianVar &X, int i, int j) const {
    LinExpr e;
    if (i == j) {
        return e; // zero
    }
    if (i > j) {
        e.terms.emplace_back(lower_pair_offset(X, i, j) + 1, 1.0);
    } else {
        e.terms.emplace_back(lower_pair_offset(X, j, i) + 1, -1.0);
    }
    return e;
}

void ConicProgram::add_eq_zero(LinExpr e) {
    e.compress();
    eq_.push_back(std::move(e));
}

void ConicProgram::add_nonneg(LinExpr e) {
    e.compress();
    nonneg_.push_back(std::move(e));
}

void ConicProgram::add_soc(const std::vector<LinExpr> &u, LinExpr t) {
    SocBlock block;
    t.compress();
    block.rows.push_back(std::move(t));
    for (LinExpr e : u) {
        e.compress();
        block.rows.push_back(std::move(e));
    }
    socs_.push_back(std::move(block));
}

void ConicProgram::add_rsoc(LinExpr p, LinExpr q,
                            const std::vector<LinExpr> &w) {
    // 2pq >= ||w||^2  <=>  ||(p - q, sqrt(2) w)|| <= p + q
    std::vector<LinExpr> u;
    u.push_back(p - q);
    for (LinExpr e : w) {
        u.push_back(std::sqrt(2.0) * std::move(e));
    }
    add_soc(u, p + q);
}

void ConicProgram::add_quadratic_upper_bound(
    const std::vector<LinExpr> &residuals, LinExpr bound) {
    // sum r^2 <= bound  as  2 * (bound/2) * 1 >= ||r||^2
    add_rsoc(0.5 * LinExpr(bound), LinExpr(1.0), residuals);
}

void ConicProgram::add_psd(const HermitianVar &X) {
    psd_vars_.push_back(X.id);
}

void ConicProgram::add_exp_cone(LinExpr x, LinExpr y, LinExpr z,
                                std::vector<double> hint_w) {
    ExpCone cone;
    x.compress();
    y.compress();
    z.compress();
    cone.x = std::move(x);
    cone.y = std::move(y);
    cone.z = std::move(z);
    cone.hints = std::move(hint_w);
    exps_.push_back(std::move(cone));
}

void ConicProgram::maximize(LinExpr objective) {
    objective.compress();
    objective_ = -1.0 * objective;
    maximize_ = true;
    has_objective_ = true;
}

void ConicProgram::minimize(LinExpr objective) {
    objective.compress();
    objective_ = std::move(objective);
    maximize_ = false;
    has_objective_ = true;
}

// ---------------------------------------------------------------------------
// Lowering to the standard form min c'x s.t. Ax=b, Gx+s=h, s in K.
// Cone order: [nonneg | soc ... | psd ...]; exponential cones contribute
// nonneg rows (y >= 0, z >= 0, and one row per supporting hyperplane).
// ---------------------------------------------------------------------------

namespace {

struct StandardForm {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    detail::ConeDims dims;
};

void fill_cone_row(Eigen::MatrixXd &G, Eigen::VectorXd &h, int row,
                   const LinExpr &e, double scale = 1.0) {
    // slack s_row = e(x) * scale
    for (const auto &[idx, coeff] : e.terms) {
        G(row, idx) -= coeff * scale;
    }
    h(row) = e.constant * scale;
}

} // namespace

struct LoweringContext {
    const ConicProgram &prog;
    std::vector<std::vector<double>> cuts; ///< per exp cone, tangent points w

    explicit LoweringContext(const ConicProgram &p) : prog(p) {
        cuts.resize(p.exps_.size());
        for (std::size_t k = 0; k < p.exps_.size(); ++k) {
            // Default bundle spans the usual operating range; user hints are
            // merged in so warm expansion points are tight from round one.
            cuts[k] = {-4.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0};
            for (double w : p.exps_[k].hints) {
                if (std::isfinite(w)) {
                    cuts[k].push_back(std::clamp(w, -30.0, 30.0));
                }
            }
            std::sort(cuts[k].begin(), cuts[k].end());
        }
    }

    StandardForm build() const {
        const int n = prog.n_params_;
        StandardForm sf;

        // objective
        sf.c = Eigen::VectorXd::Zero(n);
        for (const auto &[idx, coeff] : prog.objective_.terms) {
            sf.c(idx) += coeff;
        }

        // equalities
        const int p = static_cast<int>(prog.eq_.size());
        sf.A = Eigen::MatrixXd::Zero(p, n);
        sf.b = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < p; ++i) {
            for (const auto &[idx, coeff] : prog.eq_[i].terms) {
                sf.A(i, idx) += coeff;
            }
            sf.b(i) = -prog.eq_[i].constant;
        }

        // count cone rows
        int n_nonneg = static_cast<int>(prog.nonneg_.size());
        for (std::size_t k = 0; k < prog.exps_.size(); ++k) {
            n_nonneg += 2 + static_cast<int>(cuts[k].size());
        }
        bool pad_row = false;
        if (n_nonneg == 0 && prog.socs_.empty() && prog.psd_vars_.empty()) {
            pad_row = true; // keep the cone block nonempty
            n_nonneg = 1;
        }
        int m = n_nonneg;
        sf.dims.nonneg = n_nonneg;
        for (const auto &soc : prog.socs_) {
            sf.dims.soc.push_back(static_cast<int>(soc.rows.size()));
            m += static_cast<int>(soc.rows.size());
        }
        for (int id : prog.psd_vars_) {
            const int side = 2 * prog.hermitians_[id].side;
            sf.dims.psd.push_back(side);
            m += detail::svec_len(side);
        }

        sf.G = Eigen::MatrixXd::Zero(m, n);
        sf.h = Eigen::VectorXd::Zero(m);

        int row = 0;
        for (const auto &e : prog.nonneg_) {
            fill_cone_row(sf.G, sf.h, row++, e);
        }
        for (std::size_t k = 0; k < prog.exps_.size(); ++k) {
            const auto &cone = prog.exps_[k];
            fill_cone_row(sf.G, sf.h, row++, cone.y);
            fill_cone_row(sf.G, sf.h, row++, cone.z);
            for (double w : cuts[k]) {
                // z - e^w x - e^w (1 - w) y >= 0
                const double ew = std::exp(w);
                LinExpr cut = cone.z;
                cut -= ew * LinExpr(cone.x);
                cut -= (ew * (1.0 - w)) * LinExpr(cone.y);
                cut.compress();
                fill_cone_row(sf.G, sf.h, row++, cut);
            }
        }
        if (pad_row) {
            sf.h(row++) = 1.0; // slack fixed at 1
        }
        for (const auto &soc : prog.socs_) {
            for (const auto &e : soc.rows) {
                fill_cone_row(sf.G, sf.h, row++, e);
            }
        }
        // PSD blocks: svec of the real embedding [Re(X) -Im(X); Im(X) Re(X)]
        const double sqrt2 = 1.41421356237309504880;
        for (int id : prog.psd_vars_) {
            const HermitianVar &X = prog.hermitians_[id];
            const int nn = X.side;
            const int side = 2 * nn;
            // entry (r, c) of the embedding, r >= c, in svec order
            for (int c = 0; c < side; ++c) {
                for (int r = c; r < side; ++r) {
                    const double scale = (r == c) ? 1.0 : sqrt2;
                    double coeff = 0.0;
                    int param = -1;
                    if (r < nn && c < nn) { // Re block
                        if (r == c) {
                            param = X.offset + r;
                            coeff = 1.0;
                        } else {
                            param = lower_pair_offset(X, r, c);
                            coeff = 1.0;
                        }
                    } else if (r >= nn && c >= nn) { // Re block (copy)
                        const int rr = r - nn, cc = c - nn;
                        if (rr == cc) {
                            param = X.offset + rr;
                            coeff = 1.0;
                        } else {
                            param = lower_pair_offset(X, rr, cc);
                            coeff = 1.0;
                        }
                    } else { // r >= nn, c < nn: Im(X)_{r-nn, c}
                        const int rr = r - nn, cc = c;
                        if (rr == cc) {
                            ++row; // Im diagonal is zero
                            continue;
                        }
                        if (rr > cc) {
                            param = lower_pair_offset(X, rr, cc) + 1;
                            coeff = 1.0;
                        } else {
                            param = lower_pair_offset(X, cc, rr) + 1;
                            coeff = -1.0;
                        }
                    }
                    sf.G(row, param) -= coeff * scale;
                    ++row;
                }
            }
        }
        return sf;
    }
};

SolveResult ConicProgram::solve(double tol) const {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    if (!has_objective_) {
        result.message = "objective not set";
        return result;
    }

    detail::IpmSettings settings;
    settings.feastol = tol;
    settings.abstol = tol;
    settings.reltol = tol;

    LoweringContext ctx(*this);
    detail::IpmResult ipm;
    int total_iterations = 0;
    int rounds = 0;
    const int max_rounds = 60;
    for (rounds = 1; rounds <= max_rounds; ++rounds) {
        const StandardForm sf = ctx.build();
        ipm = detail::solve_conelp(sf.c, sf.A, sf.b, sf.G, sf.h, sf.dims,
                                   settings);
        total_iterations += ipm.iterations;
        if (ipm.status != detail::IpmStatus::optimal || exps_.empty()) {
            break;
        }
        // refine exponential cones at the returned point
        bool added = false;
        for (std::size_t k = 0; k < exps_.size(); ++k) {
            const auto &cone = exps_[k];
            const double xv = cone.x.eval(ipm.x);
            const double yv = cone.y.eval(ipm.x);
            const double zv = cone.z.eval(ipm.x);
            double w = 0.0;
            if (yv > 1e-10 * std::max(1.0, std::abs(xv))) {
                w = std::clamp(xv / yv, -30.0, 30.0);
            } else {
                w = 30.0; // enforce x <= 0 in the y -> 0 limit
            }
            const double viol = yv * std::exp(w) * (1.0 - w) +
                                std::exp(w) * xv - zv;
            if (viol > 1e-9 * std::max(1.0, std::abs(zv))) {
                auto &bundle = ctx.cuts[k];
                const bool fresh =
                    std::none_of(bundle.begin(), bundle.end(), [&](double u) {
                        return std::abs(u - w) < 1e-9;
                    });
                if (fresh) {
                    bundle.insert(std::upper_bound(bundle.begin(),
                                                   bundle.end(), w),
                                  w);
                    added = true;
                }
            }
        }
        if (!added) {
            break;
        }
    }

    result.stats.iterations = total_iterations;
    result.stats.refine_rounds = rounds;

    switch (ipm.status) {
    case detail::IpmStatus::optimal:
        result.status = SolveStatus::optimal;
        if (ipm.close_to) {
            result.message = "optimal (reduced accuracy)";
        }
        break;
    case detail::IpmStatus::primal_infeasible:
        result.status = SolveStatus::infeasible;
        result.message = "primal infeasible";
        break;
    case detail::IpmStatus::dual_infeasible:
        result.status = SolveStatus::numerical_failure;
        result.message = "dual infeasible (primal objective unbounded)";
        break;
    case detail::IpmStatus::iteration_limit:
        result.status = SolveStatus::iteration_limit;
        result.message = "iteration limit reached";
        break;
    case detail::IpmStatus::numerical_problems:
        result.status = SolveStatus::numerical_failure;
        result.message = "numerical problems";
        break;
    }

    if (result.status == SolveStatus::optimal) {
        result.x = ipm.x;
        const double raw = objective_.eval(ipm.x);
        result.objective = maximize_ ? -raw : raw;

        // report the worst violation over the original constraints
        double viol = 0.0;
        for (const auto &e : eq_) {
            viol = std::max(viol, std::abs(e.eval(ipm.x)));
        }
        for (const auto &e : nonneg_) {
            viol = std::max(viol, -e.eval(ipm.x));
        }
        for (const auto &soc : socs_) {
            double nrm = 0.0;
            for (std::size_t i = 1; i < soc.rows.size(); ++i) {
                const double v = soc.rows[i].eval(ipm.x);
                nrm += v * v;
            }
            viol = std::max(viol,
                            std::sqrt(nrm) - soc.rows[0].eval(ipm.x));
        }
        for (int id : psd_vars_) {
            const Eigen::MatrixXcd X = result.value(hermitians_[id]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
                X, Eigen::EigenvaluesOnly);
            viol = std::max(viol, -es.eigenvalues().minCoeff());
        }
        for (const auto &cone : exps_) {
            const double xv = cone.x.eval(ipm.x);
            const double yv = cone.y.eval(ipm.x);
            const double zv = cone.z.eval(ipm.x);
            if (yv > 0.0) {
                viol = std::max(viol, yv * std::exp(xv / yv) - zv);
            } else {
                viol = std::max({viol, -yv, xv, -zv});
            }
        }
        result.stats.max_violation = viol;
    }

    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

std::string ConicProgram::dump() const {
    std::ostringstream out;
    out << "conic program: " << n_params_ << " parameters, "
        << scalars_.size() << " scalars, " << hermitians_.size()
        << " hermitian matrices\n";
    for (std::size_t i = 0; i < hermitians_.size(); ++i) {
        out << "  herm " << hermitian_names_[i] << " side "
            << hermitians_[i].side << " offset " << hermitians_[i].offset
            << "\n";
    }
    auto print_expr = [&](const LinExpr &e) {
        bool first = true;
        for (const auto &[idx, coeff] : e.terms) {
            out << (first ? "" : " + ") << coeff << "*x[" << idx << "]";
            first = false;
        }
        if (e.constant != 0.0 || first) {
            out << (first ? "" : " + ") << e.constant;
        }
    };
    out << (maximize_ ? "maximize " : "minimize ");
    LinExpr obj = objective_;
    if (maximize_) {
        obj *= -1.0;
    }
    print_expr(obj);
    out << "\n";
    for (const auto &e : eq_) {
        out << "  eq: ";
        print_expr(e);
        out << " == 0\n";
    }
    for (const auto &e : nonneg_) {
        out << "  ge: ";
        print_expr(e);
        out << " >= 0\n";
    }
    for (const auto &soc : socs_) {
        out << "  soc(dim " << soc.rows.size() << "): head ";
        print_expr(soc.rows[0]);
        out << "\n";
    }
    for (int id : psd_vars_) {
        out << "  psd: " << hermitian_names_[id] << "\n";
    }
    for (const auto &cone : exps_) {
        out << "  exp: z >= y*exp(x/y) with z = ";
        print_expr(cone.z);
        out << "\n";
    }
    return out.str();
}

} // namespace nisac::conic
