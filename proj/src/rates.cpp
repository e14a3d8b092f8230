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

#include "nisac/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nisac {

namespace {

double real_quad(const Eigen::VectorXcd &h, const Eigen::MatrixXcd &w) {
    return std::max((h.adjoint() * w * h)(0, 0).real(), 0.0);
}

double log2_rate(double signal, double denom) {
    return std::log2(1.0 + signal / denom);
}

// Deterministic phase: rotate so the largest-magnitude entry is real > 0.
void normalize_phase(Eigen::VectorXcd &v) {
    int pivot = 0;
    double best = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best * (1.0 + 1e-9)) {
            best = mag;
            pivot = i;
        }
    }
    if (best > 0.0) {
        v *= std::conj(v(pivot)) / best;
    }
}

} // namespace

Eigen::MatrixXcd BeamformingSolution::total_covariance() const {
    Eigen::MatrixXcd total = remaining;
    for (const auto &w : unicast) {
        total += w;
    }
    for (const auto &w : multicast) {
        total += w;
    }
    return total;
}

double BeamformingSolution::total_trace() const {
    return total_covariance().trace().real();
}

double BeamformingSolution::worst_rank_one_ratio() const {
    double worst = 0.0;
    auto ratio = [](const Eigen::MatrixXcd &w) {
        const double tr = w.trace().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            w, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        return (tr - lmax) / std::max(tr, 1e-12);
    };
    for (const auto &w : unicast) {
        worst = std::max(worst, ratio(w));
    }
    for (const auto &w : multicast) {
        worst = std::max(worst, ratio(w));
    }
    return worst;
}

EigenSplit eig_decompose_sensing(const Eigen::MatrixXcd &r_cov,
                                 int q_streams) {
    const int n = static_cast<int>(r_cov.rows());
    if (r_cov.cols() != n) {
        throw std::invalid_argument("eig_decompose_sensing: square input");
    }
    if (q_streams < 0 || q_streams > n) {
        throw std::invalid_argument("eig_decompose_sensing: 0 <= Q <= N");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r_cov);
    Eigen::VectorXd vals = es.eigenvalues();
    Eigen::MatrixXcd vecs = es.eigenvectors();
    const double rank_tol = 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff());

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Eigen::VectorXcd> cols(n);
    for (int i = 0; i < n; ++i) {
        cols[i] = vecs.col(i);
        normalize_phase(cols[i]);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(vals(a) - vals(b)) > rank_tol) {
            return vals(a) > vals(b);
        }
        // descending lexicographic order of eigenvector real parts
        for (int i = 0; i < n; ++i) {
            const double ra = cols[a](i).real();
            const double rb = cols[b](i).real();
            if (std::abs(ra - rb) > 1e-12) {
                return ra > rb;
            }
        }
        return a < b;
    });

    EigenSplit split;
    split.remainder = Eigen::MatrixXcd::Zero(n, n);
    for (int rank = 0; rank < n; ++rank) {
        const int idx = order[rank];
        const double lambda = std::max(vals(idx), 0.0);
        if (rank < q_streams) {
            if (lambda > rank_tol) {
                split.beams.push_back(lambda * cols[idx] *
                                      cols[idx].adjoint());
            } else {
                split.beams.push_back(Eigen::MatrixXcd::Zero(n, n));
            }
        } else if (lambda > rank_tol) {
            split.remainder += lambda * cols[idx] * cols[idx].adjoint();
        }
    }
    return split;
}

RateReport noma_rates(const BeamformingSolution &sol, const ChannelSet &ch) {
    const int n_users = ch.n_users();
    const int n_streams = static_cast<int>(sol.multicast.size());
    const double noise = ch.noise_power;

    RateReport report;
    report.scheme = "noma";
    report.multicast_per_user.resize(n_streams, n_users);
    report.multicast_denominator.resize(n_streams, n_users);
    report.multicast.resize(n_streams);
    report.unicast.resize(n_users);
    report.unicast_denominator.resize(n_users);

    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        double unicast_all = 0.0; // interference from every unicast beam
        for (const auto &w : sol.unicast) {
            unicast_all += real_quad(h, w);
        }
        const double sensing_rem = real_quad(h, sol.remaining);

        for (int q = 0; q < n_streams; ++q) {
            double later_streams = 0.0;
            for (int i = q + 1; i < n_streams; ++i) {
                later_streams += real_quad(h, sol.multicast[i]);
            }
            const double denom =
                later_streams + unicast_all + sensing_rem + noise;
            report.multicast_denominator(q, k) = denom;
            report.multicast_per_user(q, k) =
                log2_rate(real_quad(h, sol.multicast[q]), denom);
        }

        const double own = real_quad(h, sol.unicast[k]);
        const double denom =
            (unicast_all - own) + sensing_rem + noise;
        report.unicast_denominator(k) = denom;
        report.unicast(k) = log2_rate(own, denom);
    }

    for (int q = 0; q < n_streams; ++q) {
        report.multicast(q) = n_users > 0
                                  ? report.multicast_per_user.row(q).minCoeff()
                                  : 0.0;
    }
    report.throughput = report.multicast.sum() + report.unicast.sum();
    return report;
}

RateReport noma_senic_rates(const BeamformingSolution &sol,
                            const ChannelSet &ch) {
    RateReport report = noma_rates(sol, ch);
    report.scheme = "noma_senic";
    report.multicast_per_user.setZero();
    report.multicast.setZero();
    report.throughput = report.unicast.sum();
    return report;
}

RateReport senic_rates(const std::vector<Eigen::MatrixXcd> &unicast,
                       const Eigen::MatrixXcd &r_cov, const ChannelSet &ch,
                       int p) {
    if (p != 0 && p != 1) {
        throw std::invalid_argument("senic_rates: p must be 0 or 1");
    }
    const int n_users = ch.n_users();
    const double noise = ch.noise_power;

    RateReport report;
    report.scheme = p == 0 ? "ideal_senic" : "no_senic";
    report.multicast_per_user.resize(0, n_users);
    report.multicast_denominator.resize(0, n_users);
    report.multicast.resize(0);
    report.unicast.resize(n_users);
    report.unicast_denominator.resize(n_users);

    for (int k = 0; k < n_users; ++k) {
        const auto &h = ch.channels[k];
        double others = 0.0;
        for (int i = 0; i < n_users; ++i) {
            if (i != k) {
                others += real_quad(h, unicast[i]);
            }
        }
        const double sensing = p == 1 ? real_quad(h, r_cov) : 0.0;
        const double denom = others + sensing + noise;
        report.unicast_denominator(k) = denom;
        report.unicast(k) = log2_rate(real_quad(h, unicast[k]), denom);
    }
    report.throughput = report.unicast.sum();
    return report;
}

RateReport com_only_rates(const std::vector<Eigen::MatrixXcd> &unicast,
                          const ChannelSet &ch) {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(
        unicast[0].rows(), unicast[0].cols());
    RateReport report = senic_rates(unicast, zero, ch, 0);
    report.scheme = "com_only";
    return report;
}

std::pair<double, double>
telescoping_identity_check(const BeamformingSolution &sol,
                           const ChannelSet &ch) {
    if (ch.n_users() != 1) {
        throw std::invalid_argument(
            "telescoping_identity_check: single user only");
    }
    const auto &h = ch.channels[0];
    const double noise = ch.noise_power;
    const int n_streams = static_cast<int>(sol.multicast.size());

    const double unicast_power = real_quad(h, sol.unicast[0]);
    const double rem = real_quad(h, sol.remaining);

    double lhs = 0.0;
    for (int q = 0; q < n_streams; ++q) {
        double later = 0.0;
        for (int i = q + 1; i < n_streams; ++i) {
            later += real_quad(h, sol.multicast[i]);
        }
        lhs += log2_rate(real_quad(h, sol.multicast[q]),
                         later + unicast_power + rem + noise);
    }
    lhs += log2_rate(unicast_power, rem + noise);

    double beams = unicast_power;
    for (const auto &w : sol.multicast) {
        beams += real_quad(h, w);
    }
    const double rhs = log2_rate(beams, rem + noise);
    return {lhs, rhs};
}

} // namespace nisac
