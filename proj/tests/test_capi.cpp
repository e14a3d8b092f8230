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
//
// Exercises the shared library through the C interface only.

#include <nisac.h>

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

TEST_CASE("version and error strings are always available") {
    CHECK(std::strlen(nisac_version()) > 0);
    CHECK(nisac_last_error() != nullptr);
}

TEST_CASE("config lifecycle and validation") {
    nisac_config *cfg = nullptr;
    REQUIRE(nisac_config_create("ci", &cfg) == NISAC_OK);
    CHECK(nisac_config_set_seed(cfg, 3) == NISAC_OK);
    CHECK(nisac_config_set(cfg, "tau1", "0.01") == NISAC_OK);
    CHECK(nisac_config_set(cfg, "log_mode", "sca") == NISAC_OK);
    CHECK(nisac_config_set(cfg, "no_such_key", "1") ==
          NISAC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(nisac_last_error()).find("no_such_key") !=
          std::string::npos);
    nisac_config_free(cfg);

    nisac_config *bad = nullptr;
    CHECK(nisac_config_create("nope", &bad) == NISAC_ERR_INVALID_ARGUMENT);
    CHECK(nisac_config_load("missing_file.cfg", &bad) == NISAC_ERR_IO);
}

TEST_CASE("scenario and multiuser solve through the C surface") {
    nisac_config *cfg = nullptr;
    REQUIRE(nisac_config_create("ci", &cfg) == NISAC_OK);
    nisac_config_set_seed(cfg, 9);

    nisac_scenario *sc = nullptr;
    REQUIRE(nisac_scenario_create(cfg, 0, &sc) == NISAC_OK);

    int grid = 0;
    REQUIRE(nisac_scenario_grid_size(sc, &grid) == NISAC_OK);
    CHECK(grid == 101);
    double ref_loss = -1.0;
    CHECK(nisac_scenario_reference_loss(sc, &ref_loss) == NISAC_OK);
    CHECK(ref_loss >= 0.0);

    std::vector<double> angles(grid), pattern(grid);
    REQUIRE(nisac_scenario_reference_pattern(sc, angles.data(),
                                             pattern.data(),
                                             angles.size()) == NISAC_OK);
    CHECK(angles.front() == doctest::Approx(-90.0));
    CHECK(angles.back() == doctest::Approx(90.0));
    CHECK(nisac_scenario_reference_pattern(sc, angles.data(), pattern.data(),
                                           3) == NISAC_ERR_BUFFER_TOO_SMALL);

    nisac_solution *sol = nullptr;
    REQUIRE(nisac_solve_multiuser(sc, "noma", 1e-3, &sol) == NISAC_OK);
    double throughput = 0.0, loss = 0.0;
    CHECK(nisac_solution_throughput(sol, &throughput) == NISAC_OK);
    CHECK(throughput > 0.0);
    CHECK(nisac_solution_loss(sol, &loss) == NISAC_OK);
    CHECK(loss <= 1e-3 * (1.0 + 1e-6));
    char status[32];
    CHECK(nisac_solution_status(sol, status, sizeof(status)) == NISAC_OK);
    CHECK(std::string(status) == "converged");
    std::vector<double> bp(grid);
    CHECK(nisac_solution_beampattern(sol, bp.data(), bp.size()) == NISAC_OK);
    double power = 0.0;
    for (double v : bp) {
        CHECK(v >= 0.0);
        power += v;
    }
    CHECK(power > 0.0);
    nisac_solution_free(sol);

    CHECK(nisac_solve_multiuser(sc, "bogus", 1e-3, &sol) ==
          NISAC_ERR_INVALID_ARGUMENT);

    nisac_scenario_free(sc);
    nisac_config_free(cfg);
}

TEST_CASE("single-user solve through the C surface") {
    nisac_config *cfg = nullptr;
    REQUIRE(nisac_config_create("ci", &cfg) == NISAC_OK);
    nisac_config_set(cfg, "n_users", "1");
    nisac_config_set_seed(cfg, 4);

    nisac_scenario *sc = nullptr;
    REQUIRE(nisac_scenario_create(cfg, 0, &sc) == NISAC_OK);

    double losses[3] = {0, 0, 0};
    for (int variant = 0; variant < 3; ++variant) {
        nisac_solution *sol = nullptr;
        REQUIRE(nisac_solve_single_user(sc, variant, 6.0, &sol) == NISAC_OK);
        REQUIRE(nisac_solution_loss(sol, &losses[variant]) == NISAC_OK);
        nisac_solution_free(sol);
    }
    // the three formulations land on the same optimal loss
    const double floor = 1e-7;
    const double scale = std::max({losses[0], losses[1], losses[2], floor});
    CHECK(std::abs(losses[0] - losses[1]) / scale <= 1e-3);
    CHECK(std::abs(losses[0] - losses[2]) / scale <= 1e-3);

    // infeasible rate floors surface as solver errors, not crashes
    nisac_solution *sol = nullptr;
    CHECK(nisac_solve_single_user(sc, 0, 40.0, &sol) == NISAC_ERR_SOLVER);

    nisac_scenario_free(sc);
    nisac_config_free(cfg);
}

TEST_CASE("batch harness entry point writes files and reports status") {
    nisac_config *cfg = nullptr;
    REQUIRE(nisac_config_create("ci", &cfg) == NISAC_OK);
    nisac_config_set_seed(cfg, 2);
    const std::string dir = "capi_out";
    REQUIRE(nisac_run_tradeoff(cfg, "noma", "1e-3,5e-4", 1, dir.c_str(),
                               0) == NISAC_OK);
    CHECK(std::filesystem::exists(dir + "/tradeoff.csv"));
    CHECK(nisac_run_tradeoff(cfg, "wat", "", 1, dir.c_str(), 0) ==
          NISAC_ERR_INVALID_ARGUMENT);
    std::filesystem::remove_all(dir);
    nisac_config_free(cfg);
}
