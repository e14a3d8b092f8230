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
#include "nisac/rng.hpp"

#include <doctest.h>

using namespace nisac;
using conic::ConicProgram;
using conic::LinExpr;
using conic::SolveStatus;

namespace {

Eigen::MatrixXcd random_hermitian(SplitMix64 &rng, int n, bool psd = false) {
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            A(i, j) = rng.next_cscg();
        }
    }
    if (psd) {
        return A * A.adjoint();
    }
    return 0.5 * (A + A.adjoint());
}

} // namespace

TEST_CASE("trivial SDP: trace equality pins the objective") {
    ConicProgram prog;
    auto X = prog.add_hermitian("X", 2);
    prog.add_psd(X);
    prog.add_eq_zero(prog.trace(X) - LinExpr(1.0));
    prog.minimize(prog.trace(X));
    const auto res = prog.solve();
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-7));
    const Eigen::MatrixXcd Xv = res.value(X);
    CHECK((Xv - Xv.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Xv);
    CHECK(es.eigenvalues().minCoeff() > -1e-7);
}

TEST_CASE("SDP objective equals the smallest eigenvalue") {
    // min <C, X> s.t. tr X = 1, X >= 0 has optimum lambda_min(C)
    SplitMix64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 3);
        const Eigen::MatrixXcd C = random_hermitian(rng, n);
        ConicProgram prog;
        auto X = prog.add_hermitian("X", n);
        prog.add_psd(X);
        prog.add_eq_zero(prog.trace(X) - LinExpr(1.0));
        prog.minimize(prog.trace_product(C, X));
        const auto res = prog.solve();
        REQUIRE(res.status == SolveStatus::optimal);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C);
        CHECK(res.objective ==
              doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-6));
    }
}

TEST_CASE("SOC epigraph of the euclidean norm") {
    ConicProgram prog;
    auto t = prog.add_scalar("t");
    std::vector<LinExpr> u = {LinExpr(3.0), LinExpr(4.0)};
    prog.add_soc(u, prog.expr(t));
    prog.minimize(prog.expr(t));
    const auto res = prog.solve();
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("exponential cone hypograph of log") {
    // maximize z s.t. z <= log(x), x = e
    ConicProgram prog;
    auto z = prog.add_scalar("z");
    auto x = prog.add_scalar("x");
    prog.add_eq_zero(prog.expr(x) - LinExpr(std::exp(1.0)));
    prog.add_exp_cone(prog.expr(z), LinExpr(1.0), prog.expr(x));
    prog.maximize(prog.expr(z));
    const auto res = prog.solve();
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("quadratic upper bound feasibility switch") {
    // residuals (1, 2): sum of squares 5
    for (const double bound : {5.0, 4.99}) {
        ConicProgram prog;
        auto d = prog.add_nonneg_scalar("d");
        std::vector<LinExpr> residuals = {LinExpr(1.0), LinExpr(2.0)};
        prog.add_quadratic_upper_bound(residuals, LinExpr(bound));
        prog.minimize(prog.expr(d));
        const auto res = prog.solve();
        if (bound == 5.0) {
            CHECK(res.status == SolveStatus::optimal);
        } else {
            CHECK(res.status == SolveStatus::infeasible);
        }
    }
}

TEST_CASE("linear infeasibility is detected") {
    ConicProgram prog;
    auto x = prog.add_scalar("x");
    prog.add_nonneg(prog.expr(x) - LinExpr(1.0)); // x >= 1
    prog.add_nonneg(LinExpr(0.0) - prog.expr(x)); // x <= 0
    prog.minimize(prog.expr(x));
    const auto res = prog.solve();
    CHECK(res.status == SolveStatus::infeasible);
}

TEST_CASE("LP corner case and determinism") {
    ConicProgram prog;
    auto a = prog.add_nonneg_scalar("a");
    auto b = prog.add_nonneg_scalar("b");
    prog.add_eq_zero(prog.expr(a) + prog.expr(b) - LinExpr(1.0));
    prog.minimize(3.0 * prog.expr(a) + 1.0 * prog.expr(b));
    const auto res1 = prog.solve();
    const auto res2 = prog.solve();
    REQUIRE(res1.status == SolveStatus::optimal);
    CHECK(res1.objective == doctest::Approx(1.0).epsilon(1e-7));
    // bitwise identical across repeat solves of the same program
    REQUIRE(res1.x.size() == res2.x.size());
    for (int i = 0; i < res1.x.size(); ++i) {
        CHECK(res1.x(i) == res2.x(i));
    }
}

TEST_CASE("realification of hermitian quadratic forms") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 6);
        ConicProgram prog;
        auto X = prog.add_hermitian("X", n);
        Eigen::VectorXcd a(n);
        for (int i = 0; i < n; ++i) {
            a(i) = rng.next_cscg();
        }
        const Eigen::MatrixXcd H = random_hermitian(rng, n);
        // pack H into the parameter vector in the program's layout
        Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.num_params());
        int idx = X.offset;
        for (int i = 0; i < n; ++i) {
            x(idx++) = H(i, i).real();
        }
        for (int j = 0; j < n; ++j) {
            for (int i = j + 1; i < n; ++i) {
                x(idx++) = H(i, j).real();
                x(idx++) = H(i, j).imag();
            }
        }
        const LinExpr form = prog.quad_form(a, X);
        const double direct = (a.adjoint() * H * a)(0, 0).real();
        CHECK(form.eval(x) == doctest::Approx(direct).epsilon(1e-12));

        const LinExpr tr = prog.trace_product(H, X);
        const double direct_tr = (H * H).trace().real();
        CHECK(tr.eval(x) == doctest::Approx(direct_tr).epsilon(1e-12));
    }
}

TEST_CASE("trace_product rejects non-hermitian coefficients") {
    ConicProgram prog;
    auto X = prog.add_hermitian("X", 2);
    Eigen::MatrixXcd M(2, 2);
    M << 1.0, std::complex<double>(0, 1), std::complex<double>(0, 1), 1.0;
    CHECK_THROWS(prog.trace_product(M, X));
}

TEST_CASE("round trip: solution satisfies the constraints it was built from") {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3;
        ConicProgram prog;
        auto X = prog.add_hermitian("X", n);
        auto t = prog.add_nonneg_scalar("t");
        prog.add_psd(X);
        prog.add_eq_zero(prog.trace(X) - LinExpr(1.0));
        Eigen::VectorXcd a(n);
        for (int i = 0; i < n; ++i) {
            a(i) = rng.next_cscg();
        }
        // a^H X a <= t, minimize t + <C, X>
        std::vector<LinExpr> residuals = {prog.quad_form(a, X)};
        prog.add_quadratic_upper_bound(residuals, prog.expr(t));
        const Eigen::MatrixXcd C = random_hermitian(rng, n);
        prog.minimize(prog.expr(t) + prog.trace_product(C, X));
        const auto res = prog.solve();
        REQUIRE(res.status == SolveStatus::optimal);
        CHECK(res.stats.max_violation < 1e-6);
    }
}

TEST_CASE("program dump mentions every block") {
    ConicProgram prog;
    auto X = prog.add_hermitian("cov", 2);
    auto t = prog.add_scalar("t");
    prog.add_psd(X);
    prog.add_eq_zero(prog.trace(X) - LinExpr(1.0));
    prog.add_soc({prog.expr(t)}, LinExpr(2.0));
    prog.minimize(prog.expr(t));
    const std::string text = prog.dump();
    CHECK(text.find("cov") != std::string::npos);
    CHECK(text.find("soc") != std::string::npos);
    CHECK(text.find("eq") != std::string::npos);
}
