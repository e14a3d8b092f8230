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
// Experiment front-end. Deliberately a thin client of the C API: all the
// heavy lifting happens inside the shared library.

#include <CLI11.hpp>

#include "nisac.h"

#include <cstdio>
#include <memory>
#include <string>

namespace {

struct ConfigDeleter {
    void operator()(nisac_config *cfg) const { nisac_config_free(cfg); }
};
using ConfigPtr = std::unique_ptr<nisac_config, ConfigDeleter>;

ConfigPtr make_config(const std::string &config_path,
                      const std::string &profile, bool seed_set,
                      std::uint64_t seed, int q) {
    nisac_config *raw = nullptr;
    nisac_status rc;
    if (!config_path.empty()) {
        rc = nisac_config_load(config_path.c_str(), &raw);
    } else {
        rc = nisac_config_create(profile.c_str(), &raw);
    }
    if (rc != NISAC_OK) {
        throw std::runtime_error(nisac_last_error());
    }
    ConfigPtr cfg(raw);
    if (seed_set) {
        nisac_config_set_seed(cfg.get(), seed);
    }
    if (q >= 0) {
        nisac_config_set_q_streams(cfg.get(), q);
    }
    return cfg;
}

int finish(nisac_status rc) {
    if (rc == NISAC_OK) {
        return 0;
    }
    std::fprintf(stderr, "error: %s\n", nisac_last_error());
    return 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"NOMA-inspired ISAC transmit beamforming experiments"};
    app.set_version_flag("--version", std::string(nisac_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string profile = "ci";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string schemes;
    std::string eps;
    int q = -1;
    int realizations = 10;
    std::string out_dir = ".";
    bool plot = false;

    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--profile", profile, "built-in profile: ci or full")
        ->check(CLI::IsMember({"ci", "full"}));
    app.add_option("--seed", seed, "master RNG seed")
        ->each([&](const std::string &) { seed_set = true; });
    app.add_option("--schemes", schemes,
                   "comma list: noma,noma_senic,ideal_senic,no_senic,"
                   "com_only");
    app.add_option("--eps", eps,
                   "pattern-error caps: comma list or lo:hi:n (log-spaced)");
    app.add_option("--q", q, "multicast-bearing sensing beams");
    app.add_option("--realizations", realizations,
                   "number of channel realizations");
    app.add_option("--out", out_dir, "output directory for CSV/SVG files");
    app.add_flag("--plot", plot, "also render SVG plots");

    auto *tradeoff = app.add_subcommand(
        "tradeoff", "throughput vs pattern-error region over realizations");

    double target_throughput = 0.0;
    auto *beampattern = app.add_subcommand(
        "beampattern", "transmit beampatterns of the selected schemes");
    beampattern->add_option(
        "--target-throughput", target_throughput,
        "bisect the cap until throughput is within 1% of this");

    std::string q_list;
    auto *q_sweep = app.add_subcommand(
        "q-sweep", "mean throughput vs number of multicast streams");
    q_sweep->add_option("--q-values", q_list, "comma list (default 1..N)");

    int su_points = 9;
    double su_rate = 9.0;
    auto *single_user = app.add_subcommand(
        "single-user", "globally optimal single-user trade-off and patterns");
    single_user->add_option("--points", su_points, "rate grid size");
    single_user->add_option("--rate", su_rate,
                            "rate (bits/s/Hz) for the beampattern output");

    auto *convergence = app.add_subcommand(
        "convergence", "per-iteration throughput/penalty trace");

    int resolution = 200;
    auto *oracle = app.add_subcommand(
        "oracle-check",
        "compare the two-antenna program against exhaustive search");
    oracle->add_option("--resolution", resolution, "grid points per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        ConfigPtr cfg = make_config(config_path, profile, seed_set, seed, q);
        if (tradeoff->parsed()) {
            return finish(nisac_run_tradeoff(cfg.get(), schemes.c_str(),
                                             eps.c_str(), realizations,
                                             out_dir.c_str(), plot ? 1 : 0));
        }
        if (beampattern->parsed()) {
            return finish(nisac_run_beampattern(
                cfg.get(), schemes.c_str(), eps.c_str(), target_throughput,
                out_dir.c_str(), plot ? 1 : 0));
        }
        if (q_sweep->parsed()) {
            return finish(nisac_run_q_sweep(cfg.get(), q_list.c_str(),
                                            eps.c_str(), realizations,
                                            out_dir.c_str()));
        }
        if (single_user->parsed()) {
            return finish(nisac_run_single_user(cfg.get(), su_points,
                                                su_rate, out_dir.c_str(),
                                                plot ? 1 : 0));
        }
        if (convergence->parsed()) {
            return finish(nisac_run_convergence(cfg.get(), eps.c_str(),
                                                out_dir.c_str(),
                                                plot ? 1 : 0));
        }
        if (oracle->parsed()) {
            return finish(nisac_run_oracle_check(cfg.get(), resolution,
                                                 out_dir.c_str()));
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
