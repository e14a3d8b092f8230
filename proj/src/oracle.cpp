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

#include "nisac/oracle.hpp"

#include "nisac/rng.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

namespace nisac::oracle {

namespace {

// h^H W h by explicit summation; the whole point of this module is to avoid
// sharing evaluation paths with the production code.
double quad_loops(const Eigen::VectorXcd &h, const Eigen::MatrixXcd &w) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < h.size(); ++i) {
        for (int j = 0; j < h.size(); ++j) {
            acc += std::conj(h(i)) * w(i, j) * h(j);
        }
    }
    return acc.real();
}

} // namespace

GridSearchResult grid_search_single_user(const ChannelSet &ch,
                                         const BeampatternSpec &spec,
                                         double eps2_bits, double pt_watts,
                                         int resolution) {
    if (ch.n_users() != 1 || ch.n_antennas() != 2) {
        throw std::invalid_argument(
            "grid_search_single_user: needs K = 1, N = 2");
    }
    if (resolution < 2) {
        throw std::invalid_argument("grid_search_single_user: resolution");
    }
    const Eigen::VectorXcd h = ch.channels[0];
    const double rate_floor =
        (std::pow(2.0, eps2_bits) - 1.0) * ch.noise_power;
    const int n_points = spec.grid_size();

    // steering phase per grid angle; pattern(R) = tr(R) + 2 Re(R10 e^{-i p})
    std::vector<double> cos_p(n_points), sin_p(n_points), dev(n_points);
    for (int l = 0; l < n_points; ++l) {
        const double p = M_PI * std::sin(spec.grid.angles_rad(l));
        cos_p[l] = std::cos(p);
        sin_p[l] = std::sin(p);
        dev[l] = spec.reference_pattern(l) - pt_watts;
    }

    auto scan_range = [&](int a_begin, int a_end) {
        GridSearchResult local;
        local.best_loss = std::numeric_limits<double>::infinity();
        for (int ia = a_begin; ia < a_end; ++ia) {
            const double a = 0.5 * M_PI * ia / (resolution - 1);
            const double ca = std::cos(a), sa = std::sin(a);
            for (int ip = 0; ip < resolution; ++ip) {
                // closed interval so grids nest when resolution doubles to
                // 2*resolution - 1
                const double phi = 2.0 * M_PI * ip / (resolution - 1);
                const std::complex<double> e_phi = std::polar(1.0, phi);
                const std::complex<double> u0 = ca, u1 = sa * e_phi;
                const std::complex<double> v0 = -sa * std::conj(e_phi),
                                           v1 = ca;
                for (int is = 0; is < resolution; ++is) {
                    const double psi = 0.5 * M_PI * is / (resolution - 1);
                    const double w1 = pt_watts * std::cos(psi) * std::cos(psi);
                    const double w2 = pt_watts - w1;
                    // R = w1 u u^H + w2 v v^H, entries written out
                    const double r00 =
                        w1 * std::norm(u0) + w2 * std::norm(v0);
                    const double r11 =
                        w1 * std::norm(u1) + w2 * std::norm(v1);
                    const std::complex<double> r10 =
                        w1 * u1 * std::conj(u0) + w2 * v1 * std::conj(v0);
                    // rate feasibility: h^H R h >= floor
                    const double received =
                        std::norm(h(0)) * r00 + std::norm(h(1)) * r11 +
                        2.0 * (std::conj(h(1)) * r10 * h(0)).real();
                    if (received < rate_floor) {
                        continue;
                    }
                    double acc = 0.0;
                    const double x = r10.real(), y = r10.imag();
                    for (int l = 0; l < n_points; ++l) {
                        // a^H R a with a = (1, e^{i p}); tr(R) = pt
                        const double pat_gap =
                            dev[l] - 2.0 * (x * cos_p[l] + y * sin_p[l]);
                        acc += pat_gap * pat_gap;
                    }
                    const double loss = acc / n_points;
                    if (loss < local.best_loss) {
                        local.best_loss = loss;
                        local.feasible_point_found = true;
                    }
                }
            }
        }
        return local;
    };

    const int n_workers = std::max(
        1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<std::future<GridSearchResult>> futures;
    const int chunk = (resolution + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(resolution, lo + chunk);
        if (lo >= hi) {
            break;
        }
        futures.push_back(
            std::async(std::launch::async, scan_range, lo, hi));
    }
    GridSearchResult best;
    best.best_loss = std::numeric_limits<double>::infinity();
    for (auto &f : futures) {
        const GridSearchResult part = f.get();
        if (part.feasible_point_found && part.best_loss < best.best_loss) {
            best.best_loss = part.best_loss;
            best.feasible_point_found = true;
        }
    }
    return best;
}

RateReport scalar_rate_reference(const BeamformingSolution &sol,
                                 const ChannelSet &ch) {
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
        const Eigen::VectorXcd &h = ch.channels[k];
        for (int q = 0; q < n_streams; ++q) {
            double inter_stream = 0.0;
            for (int i = q + 1; i < n_streams; ++i) {
                inter_stream += quad_loops(h, sol.multicast[i]);
            }
            double unicast_to_multicast = 0.0;
            for (int i = 0; i < n_users; ++i) {
                unicast_to_multicast += quad_loops(h, sol.unicast[i]);
            }
            const double rem = quad_loops(h, sol.remaining);
            const double denom =
                inter_stream + unicast_to_multicast + rem + noise;
            report.multicast_denominator(q, k) = denom;
            report.multicast_per_user(q, k) = std::log2(
                1.0 + quad_loops(h, sol.multicast[q]) / denom);
        }
        double inter_user = 0.0;
        for (int i = 0; i < n_users; ++i) {
            if (i != k) {
                inter_user += quad_loops(h, sol.unicast[i]);
            }
        }
        const double denom =
            inter_user + quad_loops(h, sol.remaining) + noise;
        report.unicast_denominator(k) = denom;
        report.unicast(k) =
            std::log2(1.0 + quad_loops(h, sol.unicast[k]) / denom);
    }
    for (int q = 0; q < n_streams; ++q) {
        double lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_users; ++k) {
            lo = std::min(lo, report.multicast_per_user(q, k));
        }
        report.multicast(q) = lo;
    }
    report.throughput = 0.0;
    for (int q = 0; q < n_streams; ++q) {
        report.throughput += report.multicast(q);
    }
    for (int k = 0; k < n_users; ++k) {
        report.throughput += report.unicast(k);
    }
    return report;
}

std::pair<double, double>
transform_tightness_at(const ChannelSet &ch, const BeamformingSolution &sol) {
    const int n_users = ch.n_users();
    const int n_streams = static_cast<int>(sol.multicast.size());
    const double noise = ch.noise_power;

    // shared multicast part of f0 and f1 (identical, kept for completeness)
    double multicast_sum = 0.0;
    for (int q = 0; q < n_streams; ++q) {
        double lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_users; ++k) {
            const Eigen::VectorXcd &h = ch.channels[k];
            double denom = noise + quad_loops(h, sol.remaining);
            for (int i = q + 1; i < n_streams; ++i) {
                denom += quad_loops(h, sol.multicast[i]);
            }
            for (int i = 0; i < n_users; ++i) {
                denom += quad_loops(h, sol.unicast[i]);
            }
            // common to f0 and f1; kept in nats like the unicast terms
            lo = std::min(lo, std::log(1.0 + quad_loops(
                                                 h, sol.multicast[q]) /
                                                 denom));
        }
        multicast_sum += n_users > 0 ? lo : 0.0;
    }

    double f0 = multicast_sum, f1 = multicast_sum;
    double g = 0.0, h_val = 0.0;
    for (int k = 0; k < n_users; ++k) {
        const Eigen::VectorXcd &hk = ch.channels[k];
        const double own = quad_loops(hk, sol.unicast[k]);
        double others = 0.0;
        for (int i = 0; i < n_users; ++i) {
            if (i != k) {
                others += quad_loops(hk, sol.unicast[i]);
            }
        }
        const double rem = quad_loops(hk, sol.remaining);
        const double denom_sinr = others + rem + noise;
        const double gamma = own / denom_sinr;
        const double alpha = gamma; // closed-form optimal multiplier

        // the transform identities live in natural log
        f0 += std::log(1.0 + gamma);
        f1 += std::log(1.0 + alpha) - alpha +
              (1.0 + alpha) * gamma / (1.0 + gamma);

        const double full_denom = own + others + rem + noise;
        g += (1.0 + alpha) * own / full_denom;
        const double beta = std::sqrt((1.0 + alpha) * own) / full_denom;
        h_val += 2.0 * beta * std::sqrt((1.0 + alpha) * own) -
                 beta * beta * full_denom;
    }
    // v(alpha) is common to f1 and the h-form objective; compare the
    // fractional parts directly.
    return {std::abs(f1 - f0), std::abs(h_val - g)};
}

BeamformingSolution random_solution(int n_antennas, int n_users,
                                    int n_streams, double pt_watts,
                                    std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto random_psd = [&](int rank) {
        Eigen::MatrixXcd a(n_antennas, rank);
        for (int i = 0; i < n_antennas; ++i) {
            for (int j = 0; j < rank; ++j) {
                a(i, j) = rng.next_cscg();
            }
        }
        return Eigen::MatrixXcd(a * a.adjoint());
    };
    BeamformingSolution sol;
    for (int k = 0; k < n_users; ++k) {
        sol.unicast.push_back(random_psd(1 + static_cast<int>(
                                                 rng.next_u64() % 2)));
    }
    for (int q = 0; q < n_streams; ++q) {
        sol.multicast.push_back(random_psd(1));
    }
    sol.remaining = random_psd(n_antennas);
    const double trace = sol.total_trace();
    const double scale = pt_watts / trace;
    for (auto &w : sol.unicast) {
        w *= scale;
    }
    for (auto &w : sol.multicast) {
        w *= scale;
    }
    sol.remaining *= scale;
    return sol;
}

std::pair<double, double> transform_tightness(const ChannelSet &ch,
                                              double pt_watts,
                                              std::uint64_t seed,
                                              int trials) {
    std::pair<double, double> worst{0.0, 0.0};
    for (int t = 0; t < trials; ++t) {
        const BeamformingSolution sol =
            random_solution(ch.n_antennas(), ch.n_users(),
                            1 + static_cast<int>(t % ch.n_antennas()),
                            pt_watts, derive_seed(seed, t));
        const auto dev = transform_tightness_at(ch, sol);
        worst.first = std::max(worst.first, dev.first);
        worst.second = std::max(worst.second, dev.second);
    }
    return worst;
}

} // namespace nisac::oracle
