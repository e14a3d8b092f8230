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
#include "nisac/rates.hpp"
#include "nisac/rng.hpp"

#include <doctest.h>

using namespace nisac;

namespace {

ChannelSet unit_channels(std::vector<Eigen::VectorXcd> hs) {
    ChannelSet ch;
    ch.channels = std::move(hs);
    ch.noise_power = 1.0;
    return ch;
}

BeamformingSolution zero_solution(int n, int k, int q) {
    BeamformingSolution sol;
    sol.unicast.assign(k, Eigen::MatrixXcd::Zero(n, n));
    sol.multicast.assign(q, Eigen::MatrixXcd::Zero(n, n));
    sol.remaining = Eigen::MatrixXcd::Zero(n, n);
    return sol;
}

} // namespace

TEST_CASE("eigen split of a diagonal covariance") {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2, 2);
    r(0, 0) = 3.0;
    r(1, 1) = 1.0;
    const auto split = eig_decompose_sensing(r, 1);
    REQUIRE(split.beams.size() == 1);
    CHECK((split.beams[0] - (Eigen::MatrixXcd(2, 2) << 3, 0, 0, 0).finished())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((split.remainder - (Eigen::MatrixXcd(2, 2) << 0, 0, 0, 1).finished())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("eigen split of zero and reconstruction of random covariances") {
    const auto zero_split =
        eig_decompose_sensing(Eigen::MatrixXcd::Zero(3, 3), 2);
    for (const auto &b : zero_split.beams) {
        CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(zero_split.remainder.cwiseAbs().maxCoeff() == 0.0);

    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4;
        Eigen::MatrixXcd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                a(i, j) = rng.next_cscg();
            }
        }
        const Eigen::MatrixXcd cov = a * a.adjoint();
        const int q = 1 + static_cast<int>(rng.next_u64() % n);
        const auto split = eig_decompose_sensing(cov, q);
        Eigen::MatrixXcd sum = split.remainder;
        for (const auto &b : split.beams) {
            sum += b;
        }
        CHECK((sum - cov).norm() < 1e-8 * cov.norm());
        if (q == n) {
            CHECK(split.remainder.norm() <= 1e-10);
        }
        // beams sorted by descending power
        for (std::size_t i = 1; i < split.beams.size(); ++i) {
            CHECK(split.beams[i - 1].trace().real() >=
                  split.beams[i].trace().real() - 1e-12);
        }
    }
}

TEST_CASE("noma rates on hand-built solutions") {
    // all-zero solution
    auto ch1 = unit_channels({Eigen::VectorXcd::Ones(2)});
    auto rep0 = noma_rates(zero_solution(2, 1, 1), ch1);
    CHECK(rep0.throughput == 0.0);
    CHECK(rep0.multicast.sum() == 0.0);
    CHECK(rep0.unicast.sum() == 0.0);

    // K=1, Q=0, unit received power -> 1 bit/s/Hz
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(2);
    h(0) = 1.0;
    auto sol = zero_solution(2, 1, 0);
    sol.unicast[0](0, 0) = 1.0;
    const auto rep1 = noma_rates(sol, unit_channels({h}));
    CHECK(rep1.throughput == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noma rates agree with the scalar oracle") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 3);
        const int k = 1 + static_cast<int>(rng.next_u64() % 3);
        const int q = static_cast<int>(rng.next_u64() % 3);
        std::vector<Eigen::VectorXcd> hs(k);
        for (auto &hk : hs) {
            hk.resize(n);
            for (int i = 0; i < n; ++i) {
                hk(i) = 10.0 * rng.next_cscg();
            }
        }
        const ChannelSet ch = unit_channels(hs);
        const auto sol =
            oracle::random_solution(n, k, q, 0.5, derive_seed(100, trial));
        const auto a = noma_rates(sol, ch);
        const auto b = oracle::scalar_rate_reference(sol, ch);
        CHECK(std::abs(a.throughput - b.throughput) < 1e-12);
        CHECK((a.unicast - b.unicast).cwiseAbs().maxCoeff() < 1e-12);
        if (q > 0) {
            CHECK((a.multicast - b.multicast).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((a.multicast_per_user - b.multicast_per_user)
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
        }

        // effective rate property: min is attained
        for (int qq = 0; qq < q; ++qq) {
            double lo = a.multicast_per_user.row(qq).minCoeff();
            CHECK(a.multicast(qq) == lo);
        }
    }
}

TEST_CASE("senic and com-only baselines") {
    SplitMix64 rng(23);
    const int n = 3, k = 2;
    std::vector<Eigen::VectorXcd> hs(k);
    for (auto &hk : hs) {
        hk.resize(n);
        for (int i = 0; i < n; ++i) {
            hk(i) = 5.0 * rng.next_cscg();
        }
    }
    const ChannelSet ch = unit_channels(hs);

    std::vector<Eigen::MatrixXcd> unicast;
    for (int i = 0; i < k; ++i) {
        Eigen::MatrixXcd a(n, 1);
        for (int j = 0; j < n; ++j) {
            a(j, 0) = rng.next_cscg();
        }
        unicast.push_back(a * a.adjoint());
    }
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);

    // with no sensing power the indicator does not matter
    const auto r0 = senic_rates(unicast, zero, ch, 0);
    const auto r1 = senic_rates(unicast, zero, ch, 1);
    CHECK(std::abs(r0.throughput - r1.throughput) < 1e-15);
    CHECK(std::abs(com_only_rates(unicast, ch).throughput - r0.throughput) <
          1e-15);

    // all-zero beams, full sensing interference
    std::vector<Eigen::MatrixXcd> zeros(k, zero);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = rng.next_cscg();
        }
    }
    CHECK(senic_rates(zeros, a * a.adjoint(), ch, 1).throughput == 0.0);

    CHECK_THROWS(senic_rates(unicast, zero, ch, 2));

    // cancelling the sensing interference can only help
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXcd b(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                b(i, j) = rng.next_cscg();
            }
        }
        const Eigen::MatrixXcd r_cov = b * b.adjoint();
        CHECK(senic_rates(unicast, r_cov, ch, 0).throughput >=
              senic_rates(unicast, r_cov, ch, 1).throughput - 1e-12);
    }

    // K=1 com-only closed form: received power 3 -> 2 bits
    Eigen::VectorXcd h1 = Eigen::VectorXcd::Zero(2);
    h1(0) = 1.0;
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(2, 2);
    w(0, 0) = 3.0;
    CHECK(com_only_rates({w}, unit_channels({h1})).throughput ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("telescoping identity") {
    // zero solution
    auto ch = unit_channels({Eigen::VectorXcd::Ones(3)});
    auto [l0, r0] = telescoping_identity_check(zero_solution(3, 1, 2), ch);
    CHECK(l0 == 0.0);
    CHECK(r0 == 0.0);

    // Q = 0: single log on both sides
    SplitMix64 rng(31);
    const auto sol0 =
        oracle::random_solution(3, 1, 0, 0.4, rng.next_u64());
    auto [l1, r1] = telescoping_identity_check(sol0, ch);
    CHECK(std::abs(l1 - r1) < 1e-12);

    // random PSD instances, all stream counts
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 3);
        const int q = static_cast<int>(rng.next_u64() % (n + 1));
        Eigen::VectorXcd h(n);
        for (int i = 0; i < n; ++i) {
            h(i) = 20.0 * rng.next_cscg();
        }
        const auto sol = oracle::random_solution(
            n, 1, q, 0.2, derive_seed(400, trial));
        auto [lhs, rhs] = telescoping_identity_check(
            sol, unit_channels({h}));
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }

    CHECK_THROWS(telescoping_identity_check(
        zero_solution(3, 2, 1),
        unit_channels({Eigen::VectorXcd::Ones(3),
                       Eigen::VectorXcd::Ones(3)})));
}

TEST_CASE("dropping a multicast beam never raises remaining denominators") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3, k = 2, q = 3;
        std::vector<Eigen::VectorXcd> hs(k);
        for (auto &hk : hs) {
            hk.resize(n);
            for (int i = 0; i < n; ++i) {
                hk(i) = 3.0 * rng.next_cscg();
            }
        }
        const ChannelSet ch = unit_channels(hs);
        const auto sol =
            oracle::random_solution(n, k, q, 1.0, derive_seed(7, trial));
        const auto base = noma_rates(sol, ch);
        const int dropped = static_cast<int>(rng.next_u64() % q);
        BeamformingSolution reduced = sol;
        reduced.multicast[dropped] =
            Eigen::MatrixXcd::Zero(n, n);
        const auto after = noma_rates(reduced, ch);
        for (int qq = 0; qq < q; ++qq) {
            if (qq == dropped) {
                continue;
            }
            for (int kk = 0; kk < k; ++kk) {
                CHECK(after.multicast_denominator(qq, kk) <=
                      base.multicast_denominator(qq, kk) + 1e-12);
            }
        }
        for (int kk = 0; kk < k; ++kk) {
            CHECK(after.unicast_denominator(kk) <=
                  base.unicast_denominator(kk) + 1e-12);
        }
    }
}

TEST_CASE("rates are invariant under joint power/noise rescaling") {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3, k = 2, q = 2;
        std::vector<Eigen::VectorXcd> hs(k);
        for (auto &hk : hs) {
            hk.resize(n);
            for (int i = 0; i < n; ++i) {
                hk(i) = 2.0 * rng.next_cscg();
            }
        }
        ChannelSet ch = unit_channels(hs);
        auto sol = oracle::random_solution(n, k, q, 0.7,
                                           derive_seed(900, trial));
        const auto base = noma_rates(sol, ch);

        const double c = 0.1 + 5.0 * rng.next_unit();
        for (auto &w : sol.unicast) {
            w *= c;
        }
        for (auto &w : sol.multicast) {
            w *= c;
        }
        sol.remaining *= c;
        ch.noise_power *= c;
        const auto scaled = noma_rates(sol, ch);
        CHECK(std::abs(base.throughput - scaled.throughput) < 1e-9);
        CHECK((base.unicast - scaled.unicast).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("noma_senic counts only unicast throughput") {
    SplitMix64 rng(61);
    const auto sol = oracle::random_solution(3, 2, 2, 0.5, rng.next_u64());
    std::vector<Eigen::VectorXcd> hs(2);
    for (auto &hk : hs) {
        hk.resize(3);
        for (int i = 0; i < 3; ++i) {
            hk(i) = 4.0 * rng.next_cscg();
        }
    }
    const ChannelSet ch = unit_channels(hs);
    const auto full = noma_rates(sol, ch);
    const auto senic = noma_senic_rates(sol, ch);
    CHECK(senic.throughput == doctest::Approx(full.unicast.sum()));
    CHECK(senic.multicast.size() == full.multicast.size());
    CHECK(senic.multicast.sum() == 0.0);
}
