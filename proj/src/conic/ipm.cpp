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

#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nisac::conic::detail {

namespace {
constexpr double kLineSearchEps = 1e-13;
constexpr double kStepMin = 1e-6;
constexpr double kStepMax = 0.999;
constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 0.70710678118654752440;
constexpr double kSafeguard = 500.0;
} // namespace

int ConeDims::total_dim() const {
    int total = nonneg;
    for (int q : soc) {
        total += q;
    }
    for (int m : psd) {
        total += svec_len(m);
    }
    return total;
}

int ConeDims::degree() const {
    int deg = nonneg + static_cast<int>(soc.size());
    for (int m : psd) {
        deg += m;
    }
    return deg;
}

int svec_len(int m) { return m * (m + 1) / 2; }

void svec_to_mat(const Eigen::VectorXd &v, int offset, Eigen::MatrixXd &M) {
    const int m = static_cast<int>(M.rows());
    const double inv_sqrt2 = 0.70710678118654752440;
    int idx = offset;
    for (int c = 0; c < m; ++c) {
        for (int r = c; r < m; ++r) {
            const double val = v(idx++);
            if (r == c) {
                M(r, c) = val;
            } else {
                M(r, c) = val * inv_sqrt2;
                M(c, r) = M(r, c);
            }
        }
    }
}

void mat_to_svec(const Eigen::MatrixXd &M, Eigen::VectorXd &v, int offset) {
    const int m = static_cast<int>(M.rows());
    const double sqrt2 = 1.41421356237309504880;
    int idx = offset;
    for (int c = 0; c < m; ++c) {
        for (int r = c; r < m; ++r) {
            v(idx++) = (r == c) ? M(r, c) : sqrt2 * 0.5 * (M(r, c) + M(c, r));
        }
    }
}

namespace {

struct SocScaling {
    double beta = 0.0; ///< W = sqrt(beta) * (2 v v' - J)
    Eigen::VectorXd v;
};

struct PsdScaling {
    Eigen::MatrixXd r;    ///< W u = svec(r' U r)
    Eigen::MatrixXd rti;  ///< r^{-T}
    Eigen::MatrixXd p;    ///< r r'
    Eigen::MatrixXd q;    ///< (r r')^{-1}
    Eigen::VectorXd eigs; ///< scaled point, Lambda = diag(eigs)
};

// Nesterov-Todd scaling state and the cone-wise vector algebra used by the
// predictor-corrector. All vectors are laid out [nonneg | soc... | psd...].
class ConeOps {
  public:
    explicit ConeOps(const ConeDims &dims) : dims_(dims) {
        offsets_.nonneg = 0;
        int off = dims.nonneg;
        for (int q : dims.soc) {
            offsets_.soc.push_back(off);
            off += q;
        }
        for (int m : dims.psd) {
            offsets_.psd.push_back(off);
            off += svec_len(m);
        }
        total_ = off;
        w_nonneg_.resize(dims.nonneg);
        soc_.resize(dims.soc.size());
        psd_.resize(dims.psd.size());
    }

    int total_dim() const { return total_; }

    void identity(Eigen::VectorXd &e) const {
        e.setZero(total_);
        e.head(dims_.nonneg).setOnes();
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            e(offsets_.soc[k]) = 1.0;
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            int idx = offsets_.psd[k];
            const int m = dims_.psd[k];
            for (int c = 0; c < m; ++c) {
                e(idx) = 1.0;
                idx += m - c;
            }
        }
    }

    // Largest violation of cone membership; <= 0 means strictly inside.
    double worst_residual(const Eigen::VectorXd &r) const {
        double alpha = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < dims_.nonneg; ++i) {
            alpha = std::max(alpha, -r(i));
        }
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            alpha = std::max(alpha, r.segment(off + 1, q - 1).norm() - r(off));
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            Eigen::MatrixXd M(m, m);
            svec_to_mat(r, offsets_.psd[k], M);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                M, Eigen::EigenvaluesOnly);
            alpha = std::max(alpha, -es.eigenvalues().minCoeff());
        }
        return alpha;
    }

    void bring_to_cone(const Eigen::VectorXd &r, Eigen::VectorXd &s) const {
        const double alpha = std::max(worst_residual(r), -0.99) + 1.0;
        Eigen::VectorXd e;
        identity(e);
        s = r + alpha * e;
    }

    bool update_scaling(const Eigen::VectorXd &s, const Eigen::VectorXd &z,
                        Eigen::VectorXd &lambda) {
        // nonneg block
        for (int i = 0; i < dims_.nonneg; ++i) {
            if (s(i) <= 0.0 || z(i) <= 0.0) {
                return false;
            }
            w_nonneg_(i) = std::sqrt(s(i) / z(i));
        }
        // second-order blocks
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            const auto sk = s.segment(off, q);
            const auto zk = z.segment(off, q);
            const double sres =
                sk(0) * sk(0) - sk.tail(q - 1).squaredNorm();
            const double zres =
                zk(0) * zk(0) - zk.tail(q - 1).squaredNorm();
            if (sres <= 0.0 || zres <= 0.0) {
                return false;
            }
            const double aa = std::sqrt(sres);
            const double bb = std::sqrt(zres);
            SocScaling &sc = soc_[k];
            sc.beta = std::sqrt(aa / bb);
            const double cc =
                std::sqrt((sk.dot(zk) / (aa * bb) + 1.0) / 2.0);
            Eigen::VectorXd v = zk / bb;
            v(0) = -v(0);
            v = -v; // v = J * zk / bb
            v += sk / aa;
            v /= (2.0 * cc);
            v(0) += 1.0;
            v /= std::sqrt(2.0 * v(0));
            sc.v = v;
        }
        // psd blocks
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            Eigen::MatrixXd S(m, m), Z(m, m);
            svec_to_mat(s, offsets_.psd[k], S);
            svec_to_mat(z, offsets_.psd[k], Z);
            Eigen::LLT<Eigen::MatrixXd> lls(S);
            Eigen::LLT<Eigen::MatrixXd> llz(Z);
            if (lls.info() != Eigen::Success ||
                llz.info() != Eigen::Success) {
                return false;
            }
            const Eigen::MatrixXd Ls = lls.matrixL();
            const Eigen::MatrixXd Lz = llz.matrixL();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(
                Lz.transpose() * Ls, Eigen::ComputeFullU);
            PsdScaling &ps = psd_[k];
            ps.eigs = svd.singularValues();
            if (ps.eigs.minCoeff() <= 0.0) {
                return false;
            }
            // r = Lz^{-T} U sqrt(Lambda), rti = Lz U / sqrt(Lambda)
            const Eigen::MatrixXd U = svd.matrixU();
            Eigen::MatrixXd X =
                Lz.transpose().triangularView<Eigen::Upper>().solve(U);
            ps.r = X * ps.eigs.cwiseSqrt().asDiagonal();
            ps.rti =
                Lz * U * ps.eigs.cwiseSqrt().cwiseInverse().asDiagonal();
            ps.p = ps.r * ps.r.transpose();
            ps.q = ps.rti * ps.rti.transpose();
        }
        apply_W(z, lambda);
        return true;
    }

    void set_identity_scaling() {
        w_nonneg_.setOnes();
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            SocScaling &sc = soc_[k];
            sc.beta = 1.0;
            sc.v.setZero(dims_.soc[k]);
            sc.v(0) = 1.0; // 2vv' - J = I when v = e_0... (see apply_soc)
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            PsdScaling &ps = psd_[k];
            const int m = dims_.psd[k];
            ps.r = Eigen::MatrixXd::Identity(m, m);
            ps.rti = ps.r;
            ps.p = ps.r;
            ps.q = ps.r;
            ps.eigs = Eigen::VectorXd::Ones(m);
        }
    }

    // W u (trans=false, adj=false), W' u (adj=true), and inverses. These only
    // differ for PSD blocks, where the scaling operator is not symmetric.
    void apply_W(const Eigen::VectorXd &u, Eigen::VectorXd &out,
                 bool inverse = false, bool adjoint = false) const {
        out.resize(total_);
        if (!inverse) {
            out.head(dims_.nonneg) =
                w_nonneg_.cwiseProduct(u.head(dims_.nonneg));
        } else {
            out.head(dims_.nonneg) =
                u.head(dims_.nonneg).cwiseQuotient(w_nonneg_);
        }
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            apply_soc(soc_[k], u, out, offsets_.soc[k], dims_.soc[k],
                      inverse);
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            const PsdScaling &ps = psd_[k];
            Eigen::MatrixXd U(m, m);
            svec_to_mat(u, off, U);
            Eigen::MatrixXd R;
            if (!inverse && !adjoint) {
                R = ps.r.transpose() * U * ps.r;
            } else if (!inverse && adjoint) {
                R = ps.r * U * ps.r.transpose();
            } else if (inverse && !adjoint) {
                // W^{-1} u = rti U rti'
                R = ps.rti * U * ps.rti.transpose();
            } else {
                // W^{-T} u = rti' U rti
                R = ps.rti.transpose() * U * ps.rti;
            }
            mat_to_svec(R, out, off);
        }
    }

    // M += G'(W'W)^{-1}G, accumulated block-wise so the work scales with
    // each cone block's column support instead of the full problem size.
    // soc_support/psd_support list the columns of G with nonzeros in the
    // respective block; nonneg_rows holds per-row sparse entries.
    void accumulate_normal_matrix(
        const Eigen::MatrixXd &G, Eigen::MatrixXd &M,
        const std::vector<std::vector<std::pair<int, double>>> &nonneg_rows,
        const std::vector<std::vector<int>> &soc_support,
        const std::vector<std::vector<int>> &psd_support) const {
        for (int i = 0; i < dims_.nonneg; ++i) {
            const double wi = 1.0 / (w_nonneg_(i) * w_nonneg_(i));
            const auto &row = nonneg_rows[i];
            for (const auto &[a, va] : row) {
                const double s = wi * va;
                for (const auto &[b, vb] : row) {
                    M(a, b) += s * vb;
                }
            }
        }
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            const SocScaling &sc = soc_[k];
            const auto &sup = soc_support[k];
            const int s = static_cast<int>(sup.size());
            if (s == 0) {
                continue;
            }
            Eigen::MatrixXd Gb(q, s);
            for (int j = 0; j < s; ++j) {
                Gb.col(j) = G.block(off, sup[j], q, 1);
            }
            // W^{-2} = beta^{-2} J H H J with H = 2vv' - J
            Eigen::MatrixXd X = Gb;
            X.bottomRows(q - 1) *= -1.0; // J X
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::RowVectorXd vx = sc.v.transpose() * X;
                Eigen::MatrixXd JX = X;
                JX.bottomRows(q - 1) *= -1.0;
                X = 2.0 * sc.v * vx - JX;
            }
            X.bottomRows(q - 1) *= -1.0; // J (...)
            X /= sc.beta * sc.beta;
            Eigen::MatrixXd Mb(s, s);
            Mb.noalias() = Gb.transpose() * X;
            for (int a = 0; a < s; ++a) {
                for (int b = 0; b < s; ++b) {
                    M(sup[a], sup[b]) += Mb(a, b);
                }
            }
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            const int len = svec_len(m);
            const PsdScaling &ps = psd_[k];
            const auto &sup = psd_support[k];
            const int s = static_cast<int>(sup.size());
            if (s == 0) {
                continue;
            }
            Eigen::MatrixXd Gb(len, s), Tb(len, s);
            Eigen::MatrixXd U(m, m), R(m, m);
            Eigen::VectorXd col(len), packed(len);
            for (int j = 0; j < s; ++j) {
                Gb.col(j) = G.block(off, sup[j], len, 1);
                col = Gb.col(j);
                svec_to_mat(col, 0, U);
                R.noalias() = ps.q * U * ps.q;
                mat_to_svec(R, packed, 0);
                Tb.col(j) = packed;
            }
            Eigen::MatrixXd Mb(s, s);
            Mb.noalias() = Gb.transpose() * Tb;
            for (int a = 0; a < s; ++a) {
                for (int b = 0; b < s; ++b) {
                    M(sup[a], sup[b]) += Mb(a, b);
                }
            }
        }
    }

    // out = (W'W) u or (W'W)^{-1} u
    void apply_WtW(const Eigen::VectorXd &u, Eigen::VectorXd &out,
                   bool inverse = false) const {
        out.resize(total_);
        if (!inverse) {
            out.head(dims_.nonneg) = w_nonneg_.array().square() *
                                     u.head(dims_.nonneg).array();
        } else {
            out.head(dims_.nonneg) = u.head(dims_.nonneg).array() /
                                     w_nonneg_.array().square();
        }
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            apply_soc(soc_[k], u, out, offsets_.soc[k], dims_.soc[k],
                      inverse);
            Eigen::VectorXd tmp = out;
            apply_soc(soc_[k], tmp, out, offsets_.soc[k], dims_.soc[k],
                      inverse);
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            const PsdScaling &ps = psd_[k];
            Eigen::MatrixXd U(m, m);
            svec_to_mat(u, off, U);
            const Eigen::MatrixXd &C = inverse ? ps.q : ps.p;
            const Eigen::MatrixXd R = C * U * C;
            mat_to_svec(R, out, off);
        }
    }

    // Jordan product w = u o v; returns sum of the "trace" components.
    void jordan_product(const Eigen::VectorXd &u, const Eigen::VectorXd &v,
                        Eigen::VectorXd &w) const {
        w.resize(total_);
        w.head(dims_.nonneg) =
            u.head(dims_.nonneg).cwiseProduct(v.head(dims_.nonneg));
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            const double u0 = u(off);
            const double v0 = v(off);
            w(off) = u.segment(off, q).dot(v.segment(off, q));
            w.segment(off + 1, q - 1) = u0 * v.segment(off + 1, q - 1) +
                                        v0 * u.segment(off + 1, q - 1);
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            Eigen::MatrixXd U(m, m), V(m, m);
            svec_to_mat(u, off, U);
            svec_to_mat(v, off, V);
            const Eigen::MatrixXd P = 0.5 * (U * V + V * U);
            mat_to_svec(P, w, off);
        }
    }

    // v = lambda \ w (Jordan division by the scaled point).
    void jordan_div_lambda(const Eigen::VectorXd &lambda,
                           const Eigen::VectorXd &w,
                           Eigen::VectorXd &v) const {
        v.resize(total_);
        v.head(dims_.nonneg) =
            w.head(dims_.nonneg).cwiseQuotient(lambda.head(dims_.nonneg));
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            const double u0 = lambda(off);
            const double w0 = w(off);
            const auto u1 = lambda.segment(off + 1, q - 1);
            const auto w1 = w.segment(off + 1, q - 1);
            const double rho = u0 * u0 - u1.squaredNorm();
            const double zeta = u1.dot(w1);
            const double factor = (zeta / u0 - w0) / rho;
            v(off) = (u0 * w0 - zeta) / rho;
            v.segment(off + 1, q - 1) = factor * u1 + w1 / u0;
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            // In the scaled frame lambda is diagonal for PSD blocks:
            // solve (Lambda X + X Lambda)/2 = W entrywise.
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            const Eigen::VectorXd &eigs = psd_[k].eigs;
            Eigen::MatrixXd W(m, m);
            svec_to_mat(w, off, W);
            Eigen::MatrixXd X(m, m);
            for (int c = 0; c < m; ++c) {
                for (int r = 0; r < m; ++r) {
                    X(r, c) = 2.0 * W(r, c) / (eigs(r) + eigs(c));
                }
            }
            mat_to_svec(X, v, off);
        }
    }

    void subtract_scaled_identity(Eigen::VectorXd &w, double value) const {
        w.head(dims_.nonneg).array() -= value;
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            w(offsets_.soc[k]) -= value;
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            int idx = offsets_.psd[k];
            const int m = dims_.psd[k];
            for (int c = 0; c < m; ++c) {
                w(idx) -= value;
                idx += m - c;
            }
        }
    }

    // Largest t such that lambda + (1/t) d stays in the cone is 1/result;
    // result <= 0 means the step is unrestricted.
    double max_step_measure(const Eigen::VectorXd &lambda,
                            const Eigen::VectorXd &d) const {
        double measure = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < dims_.nonneg; ++i) {
            measure = std::max(measure, -d(i) / lambda(i));
        }
        for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
            const int off = offsets_.soc[k];
            const int q = dims_.soc[k];
            const double lknorm2 =
                lambda(off) * lambda(off) -
                lambda.segment(off + 1, q - 1).squaredNorm();
            if (lknorm2 <= 0.0) {
                continue;
            }
            const double lknorm = std::sqrt(lknorm2);
            Eigen::VectorXd lkbar = lambda.segment(off, q) / lknorm;
            const double lkbar_times_d =
                lkbar(0) * d(off) -
                lkbar.tail(q - 1).dot(d.segment(off + 1, q - 1));
            const double factor =
                (lkbar_times_d + d(off)) / (lkbar(0) + 1.0);
            Eigen::VectorXd rho(q);
            rho(0) = lkbar_times_d / lknorm;
            rho.tail(q - 1) = (d.segment(off + 1, q - 1) -
                               factor * lkbar.tail(q - 1)) /
                              lknorm;
            measure = std::max(measure, rho.tail(q - 1).norm() - rho(0));
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
            const int m = dims_.psd[k];
            const int off = offsets_.psd[k];
            const Eigen::VectorXd &eigs = psd_[k].eigs;
            Eigen::MatrixXd D(m, m);
            svec_to_mat(d, off, D);
            for (int c = 0; c < m; ++c) {
                for (int r = 0; r < m; ++r) {
                    D(r, c) /= std::sqrt(eigs(r) * eigs(c));
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
            measure = std::max(measure, -es.eigenvalues().minCoeff());
        }
        return measure;
    }

    const ConeDims &dims() const { return dims_; }

  private:
    struct Offsets {
        int nonneg = 0;
        std::vector<int> soc;
        std::vector<int> psd;
    };

    // W u = beta (2 v (v'u) - J u); inverse uses H^{-1} = J H J.
    static void apply_soc(const SocScaling &sc, const Eigen::VectorXd &u,
                          Eigen::VectorXd &out, int off, int q,
                          bool inverse) {
        Eigen::VectorXd uk = u.segment(off, q);
        if (inverse) {
            uk.tail(q - 1) = -uk.tail(q - 1); // J u
        }
        const double vu = sc.v.dot(uk);
        Eigen::VectorXd r = 2.0 * vu * sc.v;
        r(0) -= uk(0);
        r.tail(q - 1) += uk.tail(q - 1);
        if (inverse) {
            r.tail(q - 1) = -r.tail(q - 1); // J (...)
            out.segment(off, q) = r / sc.beta;
        } else {
            out.segment(off, q) = r * sc.beta;
        }
    }

    ConeDims dims_;
    Offsets offsets_;
    int total_ = 0;
    Eigen::VectorXd w_nonneg_;
    std::vector<SocScaling> soc_;
    std::vector<PsdScaling> psd_;
};

// Dense KKT solver for
//   [ 0    A'   G'  ] [dx]   [bx]
//   [ A    0    0   ] [dy] = [by]
//   [ G    0  -W'W  ] [dz]   [bz]
// via the Schur complement M = G'(W'W)^{-1}G (+ reg), with refinement.
class KktSolver {
  public:
    KktSolver(const Eigen::MatrixXd &A, const Eigen::MatrixXd &G, double reg,
              const ConeDims &dims)
        : A_(A), G_(G), reg_(reg), n_(static_cast<int>(G.cols())),
          p_(static_cast<int>(A.rows())) {
        // sparse row/column structure, scanned once
        nonneg_rows_.resize(dims.nonneg);
        for (int i = 0; i < dims.nonneg; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (G(i, j) != 0.0) {
                    nonneg_rows_[i].emplace_back(j, G(i, j));
                }
            }
        }
        int off = dims.nonneg;
        soc_support_.resize(dims.soc.size());
        for (std::size_t k = 0; k < dims.soc.size(); ++k) {
            const int q = dims.soc[k];
            for (int j = 0; j < n_; ++j) {
                if (G.block(off, j, q, 1).cwiseAbs().maxCoeff() > 0.0) {
                    soc_support_[k].push_back(j);
                }
            }
            off += q;
        }
        psd_support_.resize(dims.psd.size());
        for (std::size_t k = 0; k < dims.psd.size(); ++k) {
            const int len = svec_len(dims.psd[k]);
            for (int j = 0; j < n_; ++j) {
                if (G.block(off, j, len, 1).cwiseAbs().maxCoeff() > 0.0) {
                    psd_support_[k].push_back(j);
                }
            }
            off += len;
        }
    }

    bool factorize(const ConeOps &cones) {
        cones_ = &cones;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_, n_);
        cones.accumulate_normal_matrix(G_, M, nonneg_rows_, soc_support_,
                                       psd_support_);
        M = 0.5 * (M + M.transpose());
        double reg = reg_ * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 6; ++attempt) {
            Eigen::MatrixXd Mreg = M;
            Mreg.diagonal().array() += reg;
            llt_.compute(Mreg);
            if (llt_.info() == Eigen::Success) {
                break;
            }
            reg *= 100.0;
        }
        if (llt_.info() != Eigen::Success) {
            return false;
        }
        if (p_ > 0) {
            Eigen::MatrixXd MinvAt = llt_.solve(A_.transpose());
            Eigen::MatrixXd S = A_ * MinvAt;
            S = 0.5 * (S + S.transpose());
            S.diagonal().array() += reg_;
            schur_llt_.compute(S);
            if (schur_llt_.info() != Eigen::Success) {
                return false;
            }
        }
        return true;
    }

    void solve(const Eigen::VectorXd &bx, const Eigen::VectorXd &by,
               const Eigen::VectorXd &bz, Eigen::VectorXd &dx,
               Eigen::VectorXd &dy, Eigen::VectorXd &dz,
               int refine_steps = 2) const {
        solve_once(bx, by, bz, dx, dy, dz);
        Eigen::VectorXd ex, ey, ez, cx, cy, cz;
        for (int it = 0; it < refine_steps; ++it) {
            residual(bx, by, bz, dx, dy, dz, ex, ey, ez);
            const double err =
                std::max({ex.lpNorm<Eigen::Infinity>(),
                          ey.size() ? ey.lpNorm<Eigen::Infinity>() : 0.0,
                          ez.lpNorm<Eigen::Infinity>()});
            const double scale = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(),
                                                 by.size()
                                                     ? by.lpNorm<Eigen::Infinity>()
                                                     : 0.0,
                                                 bz.lpNorm<Eigen::Infinity>()});
            if (err <= 1e-14 * scale) {
                break;
            }
            solve_once(ex, ey, ez, cx, cy, cz);
            dx += cx;
            if (p_ > 0) {
                dy += cy;
            }
            dz += cz;
        }
    }

  private:
    void solve_once(const Eigen::VectorXd &bx, const Eigen::VectorXd &by,
                    const Eigen::VectorXd &bz, Eigen::VectorXd &dx,
                    Eigen::VectorXd &dy, Eigen::VectorXd &dz) const {
        Eigen::VectorXd wz;
        cones_->apply_WtW(bz, wz, true);
        const Eigen::VectorXd u = bx + G_.transpose() * wz;
        if (p_ > 0) {
            const Eigen::VectorXd Minv_u = llt_.solve(u);
            dy = schur_llt_.solve(A_ * Minv_u - by);
            dx = llt_.solve(u - A_.transpose() * dy);
        } else {
            dy.resize(0);
            dx = llt_.solve(u);
        }
        Eigen::VectorXd g = G_ * dx - bz;
        cones_->apply_WtW(g, dz, true);
    }

    void residual(const Eigen::VectorXd &bx, const Eigen::VectorXd &by,
                  const Eigen::VectorXd &bz, const Eigen::VectorXd &dx,
                  const Eigen::VectorXd &dy, const Eigen::VectorXd &dz,
                  Eigen::VectorXd &ex, Eigen::VectorXd &ey,
                  Eigen::VectorXd &ez) const {
        ex = bx - G_.transpose() * dz;
        if (p_ > 0) {
            ex -= A_.transpose() * dy;
            ey = by - A_ * dx;
        } else {
            ey.resize(0);
        }
        Eigen::VectorXd wdz;
        cones_->apply_WtW(dz, wdz);
        ez = bz - G_ * dx + wdz;
    }

    const Eigen::MatrixXd &A_;
    const Eigen::MatrixXd &G_;
    const ConeOps *cones_ = nullptr;
    double reg_;
    int n_;
    int p_;
    std::vector<std::vector<std::pair<int, double>>> nonneg_rows_;
    std::vector<std::vector<int>> soc_support_;
    std::vector<std::vector<int>> psd_support_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::LLT<Eigen::MatrixXd> schur_llt_;
};

struct Iterate {
    Eigen::VectorXd x, y, z, s, lambda;
    double tau = 1.0, kap = 1.0;
    double pcost = 0.0, dcost = 0.0, gap = 0.0, pres = 0.0, dres = 0.0;
    double mu = 0.0, kapovert = 0.0;
    std::optional<double> relgap, pinfres, dinfres;
    int iter = 0;

    bool better_than(const Iterate &other) const {
        if (pinfres.has_value() && kapovert > 1.0) {
            return gap > 0.0 && other.gap > 0.0 && gap < other.gap &&
                   pinfres.value() > 0.0 && pinfres.value() < other.pres &&
                   mu > 0.0 && mu < other.mu;
        }
        return gap > 0.0 && other.gap > 0.0 && gap < other.gap &&
               pres > 0.0 && pres < other.pres && dres > 0.0 &&
               dres < other.dres && kapovert > 0.0 &&
               kapovert < other.kapovert && mu > 0.0 && mu < other.mu;
    }
};

// Row/column equilibration. Cone blocks (SOC/PSD) share a single row factor
// so the scaled rows still describe the same cone.
struct Equilibration {
    Eigen::VectorXd col, row_a, row_g;

    static void collapse_blocks(const ConeDims &dims, Eigen::VectorXd &v) {
        int off = dims.nonneg;
        for (int q : dims.soc) {
            v.segment(off, q).setConstant(v.segment(off, q).maxCoeff());
            off += q;
        }
        for (int m : dims.psd) {
            const int len = svec_len(m);
            v.segment(off, len).setConstant(v.segment(off, len).maxCoeff());
            off += len;
        }
    }

    void compute(Eigen::MatrixXd &A, Eigen::MatrixXd &G, Eigen::VectorXd &b,
                 Eigen::VectorXd &h, Eigen::VectorXd &c,
                 const ConeDims &dims, int iterations) {
        const int n = static_cast<int>(G.cols());
        const int p = static_cast<int>(A.rows());
        const int m = static_cast<int>(G.rows());
        col = Eigen::VectorXd::Ones(n);
        row_a = Eigen::VectorXd::Ones(p);
        row_g = Eigen::VectorXd::Ones(m);
        auto sqrt_or_one = [](double v) {
            return v < 1e-6 ? 1.0 : std::sqrt(v);
        };
        for (int it = 0; it < iterations; ++it) {
            Eigen::VectorXd ct = Eigen::VectorXd::Zero(n);
            Eigen::VectorXd at = Eigen::VectorXd::Zero(p);
            Eigen::VectorXd gt = Eigen::VectorXd::Zero(m);
            for (int j = 0; j < n; ++j) {
                if (p > 0) {
                    ct(j) = A.col(j).cwiseAbs().maxCoeff();
                }
                ct(j) = std::max(ct(j), G.col(j).cwiseAbs().maxCoeff());
            }
            for (int i = 0; i < p; ++i) {
                at(i) = A.row(i).cwiseAbs().maxCoeff();
            }
            for (int i = 0; i < m; ++i) {
                gt(i) = G.row(i).cwiseAbs().maxCoeff();
            }
            collapse_blocks(dims, gt);
            ct = ct.unaryExpr(sqrt_or_one);
            at = at.unaryExpr(sqrt_or_one);
            gt = gt.unaryExpr(sqrt_or_one);
            for (int i = 0; i < p; ++i) {
                A.row(i) /= at(i);
            }
            for (int i = 0; i < m; ++i) {
                G.row(i) /= gt(i);
            }
            for (int j = 0; j < n; ++j) {
                if (p > 0) {
                    A.col(j) /= ct(j);
                }
                G.col(j) /= ct(j);
            }
            col = col.cwiseProduct(ct);
            row_a = row_a.cwiseProduct(at);
            row_g = row_g.cwiseProduct(gt);
        }
        c = c.cwiseQuotient(col);
        b = b.cwiseQuotient(row_a);
        h = h.cwiseQuotient(row_g);
    }

    void restore(Eigen::VectorXd &x, Eigen::VectorXd &y, Eigen::VectorXd &z,
                 Eigen::VectorXd &s) const {
        x = x.cwiseQuotient(col);
        y = y.cwiseQuotient(row_a);
        z = z.cwiseQuotient(row_g);
        s = s.cwiseProduct(row_g);
    }
};

} // namespace

IpmResult solve_conelp(const Eigen::VectorXd &c_in, const Eigen::MatrixXd &A_in,
                       const Eigen::VectorXd &b_in, const Eigen::MatrixXd &G_in,
                       const Eigen::VectorXd &h_in, const ConeDims &dims,
                       const IpmSettings &settings) {
    Eigen::VectorXd c = c_in, b = b_in, h = h_in;
    Eigen::MatrixXd A = A_in, G = G_in;
    const int n = static_cast<int>(G.cols());
    const int p = static_cast<int>(A.rows());
    const int m = static_cast<int>(G.rows());

    IpmResult result;
    if (m != dims.total_dim()) {
        return result;
    }

    Equilibration equil;
    equil.compute(A, G, b, h, c, dims, settings.equil_iterations);

    ConeOps cones(dims);
    KktSolver kkt(A, G, settings.reg, dims);

    const double resx0 = std::max(1.0, c.norm());
    const double resy0 = std::max(1.0, b.norm());
    const double resz0 = std::max(1.0, h.norm());
    const double nu = static_cast<double>(dims.degree());

    // ---- initial iterate (identity scaling) -----------------------------
    cones.set_identity_scaling();
    if (!kkt.factorize(cones)) {
        return result;
    }
    Iterate it;
    {
        Eigen::VectorXd dx, dy, dz;
        kkt.solve(Eigen::VectorXd::Zero(n), b, h, dx, dy, dz);
        it.x = dx;
        cones.bring_to_cone(-dz, it.s);
        kkt.solve(-c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), dx,
                  dy, dz);
        it.y = p > 0 ? dy : Eigen::VectorXd();
        cones.bring_to_cone(dz, it.z);
    }
    it.tau = 1.0;
    it.kap = 1.0;
    it.lambda.resize(m);

    Iterate best = it;
    bool best_valid = false;
    double pres_prev = std::numeric_limits<double>::max();

    Eigen::VectorXd rx(n), ry(p), rz(m);
    double hresx = 0.0, hresy = 0.0, hresz = 0.0, rt = 0.0;
    double cx = 0.0, by = 0.0, hz = 0.0;
    double nx = 0.0, ny = 0.0, nz = 0.0, ns = 0.0;

    auto compute_residuals = [&]() {
        rx = -G.transpose() * it.z;
        if (p > 0) {
            rx -= A.transpose() * it.y;
        }
        hresx = rx.norm();
        rx -= it.tau * c;
        if (p > 0) {
            ry = A * it.x;
            hresy = ry.norm();
            ry -= it.tau * b;
        } else {
            ry.resize(0);
            hresy = 0.0;
        }
        rz = it.s + G * it.x;
        hresz = rz.norm();
        rz -= it.tau * h;
        cx = c.dot(it.x);
        by = p > 0 ? b.dot(it.y) : 0.0;
        hz = h.dot(it.z);
        rt = it.kap + cx + by + hz;
        nx = it.x.norm();
        ny = p > 0 ? it.y.norm() : 0.0;
        nz = it.z.norm();
        ns = it.s.norm();
    };

    auto update_statistics = [&]() {
        it.gap = it.s.dot(it.z);
        it.mu = (it.gap + it.kap * it.tau) / (nu + 1.0);
        it.kapovert = it.kap / it.tau;
        it.pcost = cx / it.tau;
        it.dcost = -(hz + by) / it.tau;
        if (it.pcost < 0.0) {
            it.relgap = it.gap / (-it.pcost);
        } else if (it.dcost > 0.0) {
            it.relgap = it.gap / it.dcost;
        } else {
            it.relgap.reset();
        }
        const double nry =
            p > 0 ? ry.norm() / std::max(resy0 + nx, 1.0) : 0.0;
        const double nrz = rz.norm() / std::max(resz0 + nx + ns, 1.0);
        it.pres = std::max(nry, nrz) / it.tau;
        it.dres = rx.norm() / std::max(resx0 + ny + nz, 1.0) / it.tau;
        it.pinfres.reset();
        it.dinfres.reset();
        if ((hz + by) / std::max(ny + nz, 1.0) < -settings.reltol) {
            it.pinfres = hresx / std::max(ny + nz, 1.0);
        }
        if (cx / std::max(nx, 1.0) < -settings.reltol) {
            it.dinfres = std::max(hresy / std::max(nx, 1.0),
                                  hresz / std::max(nx + ns, 1.0));
        }
    };

    enum class Check { none, optimal, pinf, dinf };
    auto check_exit = [&](bool reduced) {
        const double feastol =
            reduced ? settings.feastol_inacc : settings.feastol;
        const double abstol = reduced ? settings.abstol_inacc : settings.abstol;
        const double reltol = reduced ? settings.reltol_inacc : settings.reltol;
        if ((-cx > 0.0 || -by - hz >= -abstol) && it.pres < feastol &&
            it.dres < feastol &&
            (it.gap < abstol || (it.relgap && it.relgap.value() < reltol))) {
            return Check::optimal;
        }
        if (it.dinfres && it.dinfres.value() < feastol && it.tau < it.kap) {
            return Check::dinf;
        }
        if ((it.pinfres && it.pinfres.value() < feastol && it.tau < it.kap) ||
            (it.tau < feastol && it.kap < feastol && it.pinfres &&
             it.pinfres.value() < feastol)) {
            return Check::pinf;
        }
        return Check::none;
    };

    auto finish = [&](IpmStatus status, bool close) {
        compute_residuals();
        update_statistics();
        result.status = status;
        result.close_to = close;
        result.iterations = it.iter;
        result.pcost = it.pcost;
        result.dcost = it.dcost;
        result.gap = it.gap;
        result.pres = it.pres;
        result.dres = it.dres;
        Eigen::VectorXd x = it.x / it.tau, s = it.s / it.tau,
                        z = it.z / it.tau;
        Eigen::VectorXd y =
            p > 0 ? Eigen::VectorXd(it.y / it.tau) : Eigen::VectorXd();
        equil.restore(x, y, z, s);
        result.x = x;
        result.y = y;
        result.z = z;
        result.s = s;
        return result;
    };

    Eigen::VectorXd dx1(n), dy1(p), dz1(m);
    Eigen::VectorXd dx2(n), dy2(p), dz2(m);
    Eigen::VectorXd w_times_dz(m), ds_by_w(m), ds_combo(m), tmp(m);

    for (it.iter = 0; it.iter <= settings.max_iterations; ++it.iter) {
        compute_residuals();
        update_statistics();

        if (it.iter > 0 &&
            (it.pres > kSafeguard * pres_prev || it.gap < 0.0)) {
            if (best_valid) {
                it = best;
                compute_residuals();
                update_statistics();
            }
            const Check chk = check_exit(true);
            if (chk == Check::optimal) {
                return finish(IpmStatus::optimal, true);
            }
            if (chk == Check::pinf) {
                return finish(IpmStatus::primal_infeasible, true);
            }
            if (chk == Check::dinf) {
                return finish(IpmStatus::dual_infeasible, true);
            }
            return finish(IpmStatus::numerical_problems, false);
        }
        pres_prev = it.pres;

        switch (check_exit(false)) {
        case Check::optimal:
            return finish(IpmStatus::optimal, false);
        case Check::pinf:
            return finish(IpmStatus::primal_infeasible, false);
        case Check::dinf:
            return finish(IpmStatus::dual_infeasible, false);
        case Check::none:
            break;
        }

        if (it.iter == settings.max_iterations) {
            if (best_valid && best.better_than(it)) {
                it = best;
                compute_residuals();
                update_statistics();
            }
            const Check chk = check_exit(true);
            if (chk == Check::optimal) {
                return finish(IpmStatus::optimal, true);
            }
            if (chk == Check::pinf) {
                return finish(IpmStatus::primal_infeasible, true);
            }
            if (chk == Check::dinf) {
                return finish(IpmStatus::dual_infeasible, true);
            }
            return finish(IpmStatus::iteration_limit, false);
        }
        if (std::isnan(it.pcost)) {
            if (best_valid) {
                it = best;
                compute_residuals();
                update_statistics();
                if (check_exit(true) == Check::optimal) {
                    return finish(IpmStatus::optimal, true);
                }
            }
            return finish(IpmStatus::numerical_problems, false);
        }

        if (!best_valid || it.better_than(best)) {
            best = it;
            best_valid = true;
        }

        if (!cones.update_scaling(it.s, it.z, it.lambda) ||
            !kkt.factorize(cones)) {
            if (best_valid) {
                it = best;
                compute_residuals();
                update_statistics();
                if (check_exit(true) == Check::optimal) {
                    return finish(IpmStatus::optimal, true);
                }
            }
            return finish(IpmStatus::numerical_problems, false);
        }

        // dx1: static RHS [-c; b; h]
        kkt.solve(-c, b, h, dx1, dy1, dz1);
        const double dtau_denom = it.kap / it.tau - c.dot(dx1) -
                                  (p > 0 ? b.dot(dy1) : 0.0) - h.dot(dz1);

        // ---- affine (predictor) direction --------------------------------
        kkt.solve(rx, p > 0 ? Eigen::VectorXd(-ry) : Eigen::VectorXd(),
                  it.s - rz, dx2, dy2, dz2);
        const double dtauaff =
            (rt - it.kap + c.dot(dx2) + (p > 0 ? b.dot(dy2) : 0.0) +
             h.dot(dz2)) /
            dtau_denom;
        dz2 += dtauaff * dz1;
        cones.apply_W(dz2, w_times_dz);
        ds_by_w = -w_times_dz - it.lambda;
        const double dkapaff = -it.kap - it.kap / it.tau * dtauaff;

        double measure = cones.max_step_measure(it.lambda, ds_by_w);
        measure =
            std::max(measure, cones.max_step_measure(it.lambda, w_times_dz));
        if (dtauaff < 0.0) {
            measure = std::max(measure, -dtauaff / it.tau);
        }
        if (dkapaff < 0.0) {
            measure = std::max(measure, -dkapaff / it.kap);
        }
        const double step_aff =
            measure <= 0.0
                ? kStepMax
                : std::clamp(1.0 / std::max(measure, kLineSearchEps),
                             kStepMin, kStepMax);

        const double sigma = std::clamp(std::pow(1.0 - step_aff, 3),
                                        kSigmaMin, kSigmaMax);

        // ---- combined (corrector) direction ------------------------------
        cones.jordan_product(it.lambda, it.lambda, ds_combo);
        cones.jordan_product(ds_by_w, w_times_dz, tmp);
        ds_combo += tmp;
        cones.subtract_scaled_identity(ds_combo, sigma * it.mu);
        cones.jordan_div_lambda(it.lambda, ds_combo, ds_by_w);
        Eigen::VectorXd wt_ds;
        cones.apply_W(ds_by_w, wt_ds, false, true); // W' (lambda \ ds)
        const double one_minus_sigma = 1.0 - sigma;
        kkt.solve(one_minus_sigma * rx,
                  p > 0 ? Eigen::VectorXd(-one_minus_sigma * ry)
                        : Eigen::VectorXd(),
                  -one_minus_sigma * rz + wt_ds, dx2, dy2, dz2);

        const double bkap =
            it.kap * it.tau + dkapaff * dtauaff - sigma * it.mu;
        const double dtau = (one_minus_sigma * rt - bkap / it.tau +
                             c.dot(dx2) + (p > 0 ? b.dot(dy2) : 0.0) +
                             h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        if (p > 0) {
            dy2 += dtau * dy1;
        }
        dz2 += dtau * dz1;
        cones.apply_W(dz2, w_times_dz);
        ds_by_w = -(ds_by_w + w_times_dz);
        const double dkap = -(bkap + it.kap * dtau) / it.tau;

        measure = cones.max_step_measure(it.lambda, ds_by_w);
        measure =
            std::max(measure, cones.max_step_measure(it.lambda, w_times_dz));
        if (dtau < 0.0) {
            measure = std::max(measure, -dtau / it.tau);
        }
        if (dkap < 0.0) {
            measure = std::max(measure, -dkap / it.kap);
        }
        double step = measure <= 0.0
                          ? 1.0
                          : std::clamp(1.0 / std::max(measure,
                                                      kLineSearchEps),
                                       kStepMin, 1.0);
        step *= settings.step_fraction;

        Eigen::VectorXd ds;
        cones.apply_W(ds_by_w, ds, false, true); // ds = W' (W^{-T} ds)

        it.x += step * dx2;
        if (p > 0) {
            it.y += step * dy2;
        }
        it.z += step * dz2;
        it.s += step * ds;
        it.kap += step * dkap;
        it.tau += step * dtau;
    }

    return finish(IpmStatus::iteration_limit, false);
}

} // namespace nisac::conic::detail
