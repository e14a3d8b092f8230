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

#include "nisac/fp_core.hpp"

#include <cmath>
#include <stdexcept>

namespace nisac {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double real_quad(const Eigen::VectorXcd &h, const Eigen::MatrixXcd &w) {
    return std::max((h.adjoint() * w * h)(0, 0).real(), 0.0);
}

bool counts_multicast(Scheme scheme) { return scheme == Scheme::noma; }

bool has_multicast_beams(Scheme scheme) {
    return scheme == Scheme::noma || scheme == Scheme::noma_senic;
}

bool has_sensing_cov(Scheme scheme) {
    return scheme != Scheme::com_only;
}

// Sensing power seen by the unicast receiver of user k, per scheme:
// the remaining covariance for the NOMA family (SIC removed the beams),
// the full sensing covariance with p = 1, nothing with p = 0 or com-only.
double unicast_sensing_term(Scheme scheme, const BeamformingSolution &theta,
                            const Eigen::VectorXcd &h) {
    switch (scheme) {
    case Scheme::noma:
    case Scheme::noma_senic:
        return real_quad(h, theta.remaining);
    case Scheme::no_senic:
        return real_quad(h, theta.remaining);
    case Scheme::ideal_senic:
    case Scheme::com_only:
        return 0.0;
    }
    return 0.0;
}

} // namespace

const char *to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::noma:
        return "noma";
    case Scheme::noma_senic:
        return "noma_senic";
    case Scheme::ideal_senic:
        return "ideal_senic";
    case Scheme::no_senic:
        return "no_senic";
    case Scheme::com_only:
        return "com_only";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string &name) {
    if (name == "noma") {
        return Scheme::noma;
    }
    if (name == "noma_senic") {
        return Scheme::noma_senic;
    }
    if (name == "ideal_senic") {
        return Scheme::ideal_senic;
    }
    if (name == "no_senic") {
        return Scheme::no_senic;
    }
    if (name == "com_only") {
        return Scheme::com_only;
    }
    throw std::invalid_argument("unknown scheme: " + name);
}

Eigen::VectorXd update_alpha(const FpState &state, const ChannelSet &ch) {
    const int n_users = ch.n_users();
    Eigen::VectorXd alpha(n_users);
    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        const double own = real_quad(h, state.theta.unicast[k]);
        double others = 0.0;
        for (int i = 0; i < n_users; ++i) {
            if (i != k) {
                others += real_quad(h, state.theta.unicast[i]);
            }
        }
        const double denom = others +
                             unicast_sensing_term(state.scheme, state.theta,
                                                  h) +
                             ch.noise_power;
        alpha(k) = own / denom;
    }
    return alpha;
}

Eigen::VectorXd update_beta(const FpState &state, const ChannelSet &ch) {
    const int n_users = ch.n_users();
    Eigen::VectorXd beta(n_users);
    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        const double own = real_quad(h, state.theta.unicast[k]);
        double all = 0.0;
        for (int i = 0; i < n_users; ++i) {
            all += real_quad(h, state.theta.unicast[i]);
        }
        const double denom = all +
                             unicast_sensing_term(state.scheme, state.theta,
                                                  h) +
                             ch.noise_power;
        beta(k) = std::sqrt((1.0 + state.alpha(k)) * own) / denom;
    }
    return beta;
}

RateReport scheme_rates(Scheme scheme, const BeamformingSolution &theta,
                        const ChannelSet &ch) {
    switch (scheme) {
    case Scheme::noma:
        return noma_rates(theta, ch);
    case Scheme::noma_senic:
        return noma_senic_rates(theta, ch);
    case Scheme::ideal_senic:
        return senic_rates(theta.unicast, theta.remaining, ch, 0);
    case Scheme::no_senic:
        return senic_rates(theta.unicast, theta.remaining, ch, 1);
    case Scheme::com_only:
        return com_only_rates(theta.unicast, ch);
    }
    throw std::logic_error("unreachable");
}

double scheme_throughput(Scheme scheme, const BeamformingSolution &theta,
                         const ChannelSet &ch) {
    return scheme_rates(scheme, theta, ch).throughput;
}

Eigen::MatrixXcd principal_projector(const Eigen::MatrixXcd &w) {
    const auto split = eig_decompose_sensing(w, 1);
    const double lambda = split.beams[0].trace().real();
    if (lambda <= 0.0) {
        return Eigen::MatrixXcd::Zero(w.rows(), w.cols());
    }
    return split.beams[0] / lambda;
}

double rank_one_penalty(Scheme scheme, const BeamformingSolution &theta) {
    auto gap = [](const Eigen::MatrixXcd &w) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            w, Eigen::EigenvaluesOnly);
        return std::max(w.trace().real() - es.eigenvalues().maxCoeff(), 0.0);
    };
    double total = 0.0;
    for (const auto &w : theta.unicast) {
        total += gap(w);
    }
    if (has_multicast_beams(scheme)) {
        for (const auto &w : theta.multicast) {
            total += gap(w);
        }
    }
    return total;
}

// The dual/quadratic transform algebra is only a valid touching minorant in
// natural log; everything here works in nats and is converted to bits, so
// the reported value lower-bounds the bits throughput and touches it at the
// closed-form multipliers.
double fp_objective_f2(const FpState &state, const ChannelSet &ch) {
    const int n_users = ch.n_users();
    double nats = 0.0;
    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        const double own = real_quad(h, state.theta.unicast[k]);
        double all = 0.0;
        for (int i = 0; i < n_users; ++i) {
            all += real_quad(h, state.theta.unicast[i]);
        }
        const double denom = all +
                             unicast_sensing_term(state.scheme, state.theta,
                                                  h) +
                             ch.noise_power;
        const double alpha = state.alpha(k);
        const double beta = state.beta(k);
        nats += std::log(1.0 + alpha) - alpha; // v(alpha)
        nats += 2.0 * beta * std::sqrt((1.0 + alpha) * own) -
                beta * beta * denom;
    }
    double value = counts_multicast(state.scheme) ? state.rate_aux.sum() : 0.0;
    return value + nats / kLn2;
}

Subproblem build_subproblem(const FpState &state, const ChannelSet &ch,
                            const BeampatternSpec &spec, double eps1,
                            const FpOptions &options) {
    const int n_users = ch.n_users();
    const int n_streams = has_multicast_beams(state.scheme)
                              ? static_cast<int>(state.theta.multicast.size())
                              : 0;
    const int n_antennas = ch.n_antennas();
    const double noise = ch.noise_power;
    const bool sensing_var =
        has_sensing_cov(state.scheme) && !options.force_zero_sensing;

    Subproblem sub;
    auto &prog = sub.program;

    for (int k = 0; k < n_users; ++k) {
        auto w = prog.add_hermitian("W" + std::to_string(k), n_antennas);
        prog.add_psd(w);
        sub.unicast_vars.push_back(w);
    }
    for (int q = 0; q < n_streams; ++q) {
        auto w = prog.add_hermitian("Wr" + std::to_string(q), n_antennas);
        prog.add_psd(w);
        sub.multicast_vars.push_back(w);
    }
    if (sensing_var) {
        auto w = prog.add_hermitian("Rrem", n_antennas);
        prog.add_psd(w);
        sub.remaining_var = w;
    }

    // ---- objective --------------------------------------------------------
    conic::LinExpr objective;

    // unicast FP term, nats scaled to bits:
    // (2 beta_k s_k - beta_k^2 * full denominator) / ln 2
    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        const double alpha = state.alpha(k);
        const double beta = state.beta(k);

        auto s = prog.add_nonneg_scalar("s" + std::to_string(k));
        objective += (2.0 * beta / kLn2) * prog.expr(s);

        conic::LinExpr denom(noise);
        for (int i = 0; i < n_users; ++i) {
            denom += prog.quad_form(h, sub.unicast_vars[i]);
        }
        if (sensing_var && state.scheme != Scheme::ideal_senic) {
            denom += prog.quad_form(h, *sub.remaining_var);
        }
        objective -= (beta * beta / kLn2) * denom;

        // s_k^2 <= (1 + alpha_k) h^H W_k h
        prog.add_rsoc((1.0 + alpha) * prog.quad_form(h, sub.unicast_vars[k]),
                      conic::LinExpr(0.5), {prog.expr(s)});
    }

    // multicast rate auxiliaries with SCA bounds
    if (n_streams > 0 &&
        (counts_multicast(state.scheme) || options.senic_rate_floor > 0.0)) {
        for (int q = 0; q < n_streams && counts_multicast(state.scheme);
             ++q) {
            auto r = prog.add_nonneg_scalar("Rm" + std::to_string(q));
            sub.rate_aux_vars.push_back(r);
            objective += prog.expr(r);
        }
        for (int q = 0; q < n_streams; ++q) {
            for (int k = 0; k < n_users; ++k) {
                const auto &h = ch.channels[k];

                // interference at the q-th SIC stage (expansion constants)
                double dn = noise;
                for (int i = q + 1; i < n_streams; ++i) {
                    dn += real_quad(h, state.theta.multicast[i]);
                }
                for (int i = 0; i < n_users; ++i) {
                    dn += real_quad(h, state.theta.unicast[i]);
                }
                dn += real_quad(h, state.theta.remaining);
                const double yn = dn + real_quad(h, state.theta.multicast[q]);

                conic::LinExpr d_expr(noise);
                for (int i = q + 1; i < n_streams; ++i) {
                    d_expr += prog.quad_form(h, sub.multicast_vars[i]);
                }
                for (int i = 0; i < n_users; ++i) {
                    d_expr += prog.quad_form(h, sub.unicast_vars[i]);
                }
                if (sensing_var) {
                    d_expr += prog.quad_form(h, *sub.remaining_var);
                }
                conic::LinExpr y_expr =
                    d_expr + prog.quad_form(h, sub.multicast_vars[q]);

                // taylor lower bound of -log2 of the interference
                conic::LinExpr t_tilde(-std::log2(dn) + 1.0 / kLn2);
                t_tilde -= (1.0 / (dn * kLn2)) * d_expr;

                // hypograph of log2 of the full received power
                conic::LinExpr log_term;
                if (options.log_mode == LogMode::exp_cone) {
                    auto g = prog.add_scalar("g" + std::to_string(q) + "_" +
                                             std::to_string(k));
                    prog.add_exp_cone(kLn2 * prog.expr(g),
                                      conic::LinExpr(1.0), y_expr,
                                      {std::log(yn)});
                    log_term = prog.expr(g);
                } else {
                    // log2(y) >= log2(yn) + (1 - yn/y)/ln2, via u >= yn/y
                    auto u = prog.add_nonneg_scalar(
                        "u" + std::to_string(q) + "_" + std::to_string(k));
                    prog.add_rsoc(prog.expr(u), y_expr,
                                  {conic::LinExpr(std::sqrt(2.0 * yn))});
                    log_term = conic::LinExpr(std::log2(yn) + 1.0 / kLn2);
                    log_term -= (1.0 / kLn2) * prog.expr(u);
                }

                if (counts_multicast(state.scheme)) {
                    prog.add_nonneg(log_term + t_tilde -
                                    prog.expr(sub.rate_aux_vars[q]));
                } else {
                    prog.add_nonneg(log_term + t_tilde -
                                    conic::LinExpr(options.senic_rate_floor));
                }
            }
        }
    }

    // linearized rank-one penalty, weight 1/zeta
    const double penalty_weight = 1.0 / state.zeta;
    for (int k = 0; k < n_users; ++k) {
        const Eigen::MatrixXcd proj =
            principal_projector(state.theta.unicast[k]);
        conic::LinExpr term = prog.trace(sub.unicast_vars[k]);
        if (proj.cwiseAbs().maxCoeff() > 0.0) {
            term -= prog.trace_product(proj, sub.unicast_vars[k]);
        }
        objective -= penalty_weight * term;
    }
    for (int q = 0; q < n_streams; ++q) {
        const Eigen::MatrixXcd proj =
            principal_projector(state.theta.multicast[q]);
        conic::LinExpr term = prog.trace(sub.multicast_vars[q]);
        if (proj.cwiseAbs().maxCoeff() > 0.0) {
            term -= prog.trace_product(proj, sub.multicast_vars[q]);
        }
        objective -= penalty_weight * term;
    }

    // ---- constraints ------------------------------------------------------
    // pattern error cap: sum_l residual^2 <= L * eps1. The loss cannot
    // exceed (N pt)^2, so larger caps are clamped; that keeps vacuous caps
    // from polluting the problem scaling.
    const double loss_cap = std::pow(n_antennas * spec.pt_watts, 2);
    const double eps_eff = std::min(eps1, loss_cap);
    std::vector<conic::LinExpr> residuals;
    residuals.reserve(spec.grid_size());
    for (int l = 0; l < spec.grid_size(); ++l) {
        conic::LinExpr r(spec.reference_pattern(l));
        for (const auto &w : sub.unicast_vars) {
            r -= prog.quad_form(spec.grid.steering[l], w);
        }
        for (const auto &w : sub.multicast_vars) {
            r -= prog.quad_form(spec.grid.steering[l], w);
        }
        if (sensing_var) {
            r -= prog.quad_form(spec.grid.steering[l], *sub.remaining_var);
        }
        residuals.push_back(std::move(r));
    }
    prog.add_quadratic_upper_bound(
        residuals, conic::LinExpr(spec.grid_size() * eps_eff));

    // exact power budget
    conic::LinExpr power;
    for (const auto &w : sub.unicast_vars) {
        power += prog.trace(w);
    }
    for (const auto &w : sub.multicast_vars) {
        power += prog.trace(w);
    }
    if (sensing_var) {
        power += prog.trace(*sub.remaining_var);
    }
    prog.add_eq_zero(power - conic::LinExpr(spec.pt_watts));

    prog.maximize(objective);
    return sub;
}

SubproblemSolution solve_subproblem(const Subproblem &sub, int n_antennas,
                                    double tol) {
    SubproblemSolution out;
    const auto res = sub.program.solve(tol);
    out.status = res.status;
    out.wall_ms = res.stats.wall_ms;
    if (res.status != conic::SolveStatus::optimal) {
        return out;
    }
    out.conic_objective = res.objective;
    for (const auto &v : sub.unicast_vars) {
        out.theta.unicast.push_back(res.value(v));
    }
    for (const auto &v : sub.multicast_vars) {
        out.theta.multicast.push_back(res.value(v));
    }
    out.theta.remaining = sub.remaining_var
                              ? res.value(*sub.remaining_var)
                              : Eigen::MatrixXcd::Zero(n_antennas,
                                                       n_antennas);
    out.rate_aux.resize(sub.rate_aux_vars.size());
    for (std::size_t q = 0; q < sub.rate_aux_vars.size(); ++q) {
        out.rate_aux(q) = res.value(sub.rate_aux_vars[q]);
    }
    return out;
}

} // namespace nisac
