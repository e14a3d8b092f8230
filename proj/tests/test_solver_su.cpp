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
#include "nisac/solver_su.hpp"

#include <doctest.h>

using namespace nisac;

namespace {

struct SuFixture {
    SystemConfig cfg;
    ChannelSet ch;
    BeampatternSpec spec;

    SuFixture() {
        cfg = SystemConfig::ci_profile();
        cfg.n_users = 1;
        ch = sample_channels(cfg, 21);
        spec = build_beampattern_spec(cfg);
    }

    // Rate the zero-loss reference covariance already delivers; floors
    // below this leave the constraint inactive and the loss at zero.
    double ref_rate() const {
        return std::log2(1.0 + (ch.channels[0].adjoint() *
                                spec.reference_cov * ch.channels[0])(0, 0)
                                   .real());
    }
};

// Relative disagreement with an absolute floor: losses below the floor
// count as zero (the fit is exact there up to solver accuracy). The floor
// is 1e-5 of the squared power budget.
double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7});
}

} // namespace

TEST_CASE("relaxed rate floors keep the sensing optimum") {
    SuFixture fx;
    const double pt = fx.cfg.pt_watts();

    const auto at_zero = solve_p41(fx.ch, fx.spec, 0.0, pt);
    REQUIRE(at_zero.status == conic::SolveStatus::optimal);
    CHECK(at_zero.loss <= 1e-8);

    // the reference covariance itself meets this rate floor with equality
    const double ref_rate = std::log2(
        1.0 + (fx.ch.channels[0].adjoint() * fx.spec.reference_cov *
               fx.ch.channels[0])(0, 0)
                  .real());
    const auto at_ref = solve_p41(fx.ch, fx.spec, ref_rate, pt);
    REQUIRE(at_ref.status == conic::SolveStatus::optimal);
    CHECK(at_ref.loss <= 1e-7);

    const auto p61 = solve_p61(fx.ch, fx.spec, 0.0, pt, 0);
    REQUIRE(p61.status == conic::SolveStatus::optimal);
    CHECK(p61.loss <= 1e-8);
    const auto p61b = solve_p61(fx.ch, fx.spec, 0.0, pt, 1);
    REQUIRE(p61b.status == conic::SolveStatus::optimal);
    CHECK(p61b.loss <= 1e-8);
}

TEST_CASE("rate floor at capacity forces the matched-filter covariance") {
    SuFixture fx;
    const double pt = fx.cfg.pt_watts();
    const double max_rate = su_max_rate_bits(fx.ch, pt);

    // just inside the feasible range: solution approaches pt * h h^H/|h|^2
    const double eps2 = max_rate - 1e-6;
    const auto res = solve_p41(fx.ch, fx.spec, eps2, pt);
    REQUIRE(res.status == conic::SolveStatus::optimal);
    const auto &h = fx.ch.channels[0];
    const Eigen::MatrixXcd forced =
        pt * (h * h.adjoint()) / h.squaredNorm();
    const double forced_loss = matching_loss(forced, fx.spec);
    CHECK(res.loss == doctest::Approx(forced_loss).epsilon(1e-3));

    // beyond capacity: infeasible status, never a crash
    const auto bad = solve_p41(fx.ch, fx.spec, max_rate + 0.05, pt);
    CHECK(bad.status == conic::SolveStatus::infeasible);
    const auto bad61 = solve_p61(fx.ch, fx.spec, max_rate + 0.05, pt, 0);
    CHECK(bad61.status == conic::SolveStatus::infeasible);
}

TEST_CASE("split and joint formulations achieve the same loss") {
    SuFixture fx;
    const double pt = fx.cfg.pt_watts();
    const double max_rate = su_max_rate_bits(fx.ch, pt);
    const double lo = fx.ref_rate();
    REQUIRE(lo < max_rate);

    for (double frac : {0.5, 0.8, 0.95}) {
        // toward the capacity end, where the rate floor binds
        const double eps2 = lo + frac * (max_rate - lo);
        const auto joint = solve_p41(fx.ch, fx.spec, eps2, pt, 1e-10);
        const auto p0 = solve_p61(fx.ch, fx.spec, eps2, pt, 0, 1e-10);
        const auto p1 = solve_p61(fx.ch, fx.spec, eps2, pt, 1, 1e-10);
        REQUIRE(joint.status == conic::SolveStatus::optimal);
        REQUIRE(p0.status == conic::SolveStatus::optimal);
        REQUIRE(p1.status == conic::SolveStatus::optimal);
        if (frac > 0.9) {
            CHECK(joint.loss > 1e-6); // genuinely active near capacity
        }

        const double scale = std::max({joint.loss, p0.loss, p1.loss, 1e-12});
        CHECK(rel_gap(joint.loss, p0.loss) <= 1e-3);
        CHECK(rel_gap(joint.loss, p1.loss) <= 1e-3);
        // the larger feasible set can only do better
        CHECK(p0.loss <= p1.loss + 1e-4 * scale + 1e-10);

        // merging the split optimum stays feasible for the joint problem
        // and achieves the same loss
        const Eigen::MatrixXcd merged = p1.unicast_cov + p1.sensing_cov;
        const double floor = (std::pow(2.0, eps2) - 1.0) * fx.ch.noise_power;
        const double received =
            (fx.ch.channels[0].adjoint() * merged * fx.ch.channels[0])(0, 0)
                .real();
        CHECK(received >= floor - 1e-6 * floor);
        CHECK(std::abs(merged.trace().real() - pt) <= 1e-6 * pt);
        CHECK(std::abs(matching_loss(merged, fx.spec) - p1.loss) <=
              1e-6 + 1e-3 * scale);
    }
}

TEST_CASE("single-user sweep: agreement, monotonicity, boundary") {
    SuFixture fx;
    const double pt = fx.cfg.pt_watts();
    const double max_rate = su_max_rate_bits(fx.ch, pt);
    std::vector<double> grid;
    for (int i = 0; i <= 6; ++i) {
        grid.push_back(max_rate * i / 7.0);
    }
    const auto rows = sweep_single_user(fx.ch, fx.spec, grid, pt, 1e-10);
    REQUIRE(rows.size() == grid.size());

    CHECK(rows[0].joint.loss <= 1e-8);
    CHECK(rows[0].split_p0.loss <= 1e-8);
    CHECK(rows[0].split_p1.loss <= 1e-8);

    double prev = -1.0;
    for (const auto &row : rows) {
        REQUIRE(row.joint.status == conic::SolveStatus::optimal);
        CHECK(rel_gap(row.joint.loss, row.split_p0.loss) <= 1e-3);
        CHECK(rel_gap(row.joint.loss, row.split_p1.loss) <= 1e-3);
        CHECK(row.joint.loss >= prev - 1e-9); // non-decreasing in the floor
        prev = row.joint.loss;
    }

    CHECK_THROWS(sweep_single_user(fx.ch, fx.spec, {1.0, 0.5}, pt));
}
