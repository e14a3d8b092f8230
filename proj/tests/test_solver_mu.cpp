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

#include "nisac/solver_mu.hpp"
#include "nisac/solver_su.hpp"

#include <doctest.h>

using namespace nisac;

namespace {

struct MuFixture {
    SystemConfig cfg;
    ChannelSet ch;
    BeampatternSpec spec;

    explicit MuFixture(std::uint64_t seed = 31, int users = 2) {
        cfg = SystemConfig::ci_profile();
        cfg.n_users = users;
        ch = sample_channels(cfg, seed);
        spec = build_beampattern_spec(cfg);
    }

    double mid_eps() const {
        // a mid-range error cap derived from the isotropic design's loss
        const Eigen::MatrixXcd iso =
            (cfg.pt_watts() / cfg.n_antennas) *
            Eigen::MatrixXcd::Identity(cfg.n_antennas, cfg.n_antennas);
        return 0.3 * matching_loss(iso, spec);
    }
};

} // namespace

TEST_CASE("initialize respects the error cap at both extremes") {
    MuFixture fx;
    MuSolveConfig cfg;
    cfg.scheme = Scheme::noma;
    cfg.q_streams = 1;

    cfg.eps1 = 1e9; // no effective cap: the comm endpoint is kept
    auto st = initialize(fx.ch, fx.spec, cfg);
    CHECK(st.theta.unicast[0].trace().real() > 1e-4);
    CHECK(std::abs(st.theta.total_trace() - fx.spec.pt_watts) <=
          1e-9 * fx.spec.pt_watts);

    cfg.eps1 = 0.0; // exact cap: only the sensing split qualifies
    st = initialize(fx.ch, fx.spec, cfg);
    CHECK(matching_loss(st.theta.total_covariance(), fx.spec) <= 1e-10);
    CHECK(st.theta.unicast[0].cwiseAbs().maxCoeff() <= 1e-12);

    cfg.eps1 = fx.mid_eps();
    st = initialize(fx.ch, fx.spec, cfg);
    CHECK(matching_loss(st.theta.total_covariance(), fx.spec) <= cfg.eps1);
    CHECK(std::abs(st.theta.total_trace() - fx.spec.pt_watts) <=
          1e-9 * fx.spec.pt_watts);

    MuSolveConfig bad = cfg;
    bad.rho = 1.5;
    CHECK_THROWS(initialize(fx.ch, fx.spec, bad));
}

TEST_CASE("noma solve: convergence, feasibility, monotone inner objective") {
    MuFixture fx;
    MuSolveConfig cfg;
    cfg.scheme = Scheme::noma;
    cfg.q_streams = 1;
    cfg.eps1 = fx.mid_eps();

    const auto trace = solve_mu(fx.ch, fx.spec, cfg);
    REQUIRE(trace.status == MuStatus::converged);
    CHECK(trace.final_penalty <= cfg.tau2);
    CHECK(trace.solution.worst_rank_one_ratio() <= 1e-3);
    CHECK(trace.report.throughput > 0.0);

    // full re-check of the constraint set from scratch
    const auto feas = check_feasibility(trace.solution, fx.spec, cfg.eps1);
    CHECK(feas.loss_excess <= 1e-6 * cfg.eps1);
    CHECK(feas.power_gap <= 1e-5 * fx.spec.pt_watts);
    CHECK(feas.min_eigenvalue >= -1e-7);

    // per inner iteration, the penalized objective must not decrease
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        if (trace.rows[i].outer == trace.rows[i - 1].outer) {
            CHECK(trace.rows[i].penalized_objective >=
                  trace.rows[i - 1].penalized_objective - 1e-6);
        }
    }
    CHECK(trace.total_inner >= 1);
    CHECK(trace.total_outer >= 1);
}

TEST_CASE("loose cap single-user run approaches the convex bound") {
    MuFixture fx(47, 1);
    MuSolveConfig cfg;
    cfg.scheme = Scheme::ideal_senic;
    cfg.q_streams = 0;
    cfg.eps1 = 1e9;

    const auto trace = solve_mu(fx.ch, fx.spec, cfg);
    REQUIRE(trace.status == MuStatus::converged);
    const double bound = su_max_rate_bits(fx.ch, fx.spec.pt_watts);
    CHECK(trace.report.throughput >= 0.98 * bound);
    CHECK(trace.report.throughput <= bound + 1e-6);
}

TEST_CASE("benchmark orderings at matched caps") {
    for (std::uint64_t seed : {101, 202}) {
        MuFixture fx(seed);
        MuSolveConfig cfg;
        cfg.eps1 = fx.mid_eps();
        const int full_q = fx.cfg.n_antennas; // full split for the ordering

        // solved as a chain: each scheme also starts from the previous
        // scheme's design mapped through the constructive feasibility
        // argument, so a lucky local optimum propagates up the chain
        cfg.scheme = Scheme::no_senic;
        cfg.q_streams = 0;
        const auto none = solve_mu_best(fx.ch, fx.spec, cfg);
        cfg.scheme = Scheme::ideal_senic;
        const auto ideal = solve_mu_best(
            fx.ch, fx.spec, cfg,
            convert_layout(none.solution, Scheme::no_senic,
                           Scheme::ideal_senic, 0));
        cfg.scheme = Scheme::noma;
        cfg.q_streams = full_q;
        const auto noma = solve_mu_best(
            fx.ch, fx.spec, cfg,
            convert_layout(ideal.solution, Scheme::ideal_senic, Scheme::noma,
                           full_q));

        REQUIRE(noma.status == MuStatus::converged);
        REQUIRE(ideal.status == MuStatus::converged);
        REQUIRE(none.status == MuStatus::converged);
        CHECK(noma.report.throughput >= ideal.report.throughput - 1e-2);
        CHECK(ideal.report.throughput >= none.report.throughput - 2e-2);

        // dropping the multicast payload cannot raise the objective
        MuSolveConfig senic_cfg = cfg;
        senic_cfg.scheme = Scheme::noma_senic;
        senic_cfg.q_streams = 1;
        const auto senic = solve_mu_best(
            fx.ch, fx.spec, senic_cfg,
            convert_layout(ideal.solution, Scheme::ideal_senic,
                           Scheme::noma_senic, 1));
        MuSolveConfig noma1 = senic_cfg;
        noma1.scheme = Scheme::noma;
        const auto noma_q1 = solve_mu_best(
            fx.ch, fx.spec, noma1,
            convert_layout(senic.solution, Scheme::noma_senic, Scheme::noma,
                           1));
        REQUIRE(senic.status == MuStatus::converged);
        REQUIRE(noma_q1.status == MuStatus::converged);
        CHECK(senic.report.throughput <=
              noma_q1.report.throughput + 1e-2);
    }
}

TEST_CASE("com_only equals ideal_senic with the sensing block removed") {
    SystemConfig sys = SystemConfig::ci_profile();
    sys.n_antennas = 2;
    sys.n_users = 2; // K >= N
    const ChannelSet ch = sample_channels(sys, 7);
    const auto spec = build_beampattern_spec(sys);

    MuSolveConfig cfg;
    cfg.q_streams = 0;
    const Eigen::MatrixXcd iso =
        (sys.pt_watts() / 2.0) * Eigen::MatrixXcd::Identity(2, 2);
    cfg.eps1 = 0.5 * matching_loss(iso, spec);

    cfg.scheme = Scheme::com_only;
    const auto com = solve_mu(ch, spec, cfg);
    cfg.scheme = Scheme::ideal_senic;
    cfg.fp.force_zero_sensing = true;
    const auto ideal0 = solve_mu(ch, spec, cfg);
    REQUIRE(com.status == MuStatus::converged);
    REQUIRE(ideal0.status == MuStatus::converged);
    CHECK(std::abs(com.report.throughput - ideal0.report.throughput) <=
          1e-6);
}

TEST_CASE("warm-started sweep yields a monotone trade-off") {
    MuFixture fx(77);
    const double base = fx.mid_eps();
    const std::vector<double> eps_grid = {3.0 * base, 1.0 * base,
                                          0.3 * base};
    MuSolveConfig cfg;
    cfg.scheme = Scheme::noma;
    cfg.q_streams = 1;

    double prev_throughput = 1e18;
    std::optional<BeamformingSolution> warm;
    for (double eps : eps_grid) {
        cfg.eps1 = eps;
        cfg.warm_start = warm;
        const auto trace = solve_mu(fx.ch, fx.spec, cfg);
        REQUIRE(trace.status == MuStatus::converged);
        CHECK(trace.report.throughput <= prev_throughput + 1e-2);
        prev_throughput = trace.report.throughput;
        warm = trace.solution;
    }
}
