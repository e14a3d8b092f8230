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

#include "nisac.h"

#include "nisac/harness.hpp"
#include "nisac/rng.hpp"

#include <cstring>
#include <sstream>
#include <string>

using namespace nisac;

namespace {

thread_local std::string g_last_error;

nisac_status fail(nisac_status code, const std::string &message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
nisac_status guarded(Fn &&fn) {
    try {
        return fn();
    } catch (const std::invalid_argument &e) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception &e) {
        return fail(NISAC_ERR_INTERNAL, e.what());
    }
}

std::vector<std::string> split_csv(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<Scheme> parse_schemes(const char *csv) {
    std::vector<Scheme> out;
    if (csv == nullptr || *csv == '\0') {
        return {Scheme::noma, Scheme::ideal_senic, Scheme::no_senic};
    }
    for (const auto &name : split_csv(csv)) {
        out.push_back(scheme_from_string(name));
    }
    if (out.empty()) {
        throw std::invalid_argument("no schemes given");
    }
    return out;
}

// "a,b,c" or "lo:hi:n" (n log-spaced caps, descending)
std::vector<double> parse_eps(const char *csv) {
    std::vector<double> out;
    if (csv == nullptr || *csv == '\0') {
        return out;
    }
    const std::string text(csv);
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        int n = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 ||
            n < 1 || lo <= 0.0 || hi <= 0.0) {
            throw std::invalid_argument("eps range must be lo:hi:n");
        }
        for (int i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            out.push_back(hi * std::pow(lo / hi, t));
        }
        return out;
    }
    for (const auto &item : split_csv(text)) {
        out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

struct nisac_config {
    SystemConfig system;
    MuSolveConfig solver;
};

struct nisac_scenario {
    SystemConfig system;
    ChannelSet channels;
    BeampatternSpec spec;
    MuSolveConfig solver;
};

struct nisac_solution {
    bool multiuser = true;
    SolveTrace trace;    // multiuser
    SuSolve su;          // single-user
    double su_loss = 0.0;
    const BeampatternSpec *spec = nullptr; // owned by scenario; see create
    BeampatternSpec spec_copy;
};

extern "C" {

const char *nisac_version(void) { return "0.1.0"; }

const char *nisac_last_error(void) { return g_last_error.c_str(); }

nisac_status nisac_config_create(const char *profile, nisac_config **out) {
    return guarded([&]() {
        if (out == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null output");
        }
        const std::string p = profile ? profile : "ci";
        auto *cfg = new nisac_config;
        if (p == "ci") {
            cfg->system = SystemConfig::ci_profile();
        } else if (p == "full") {
            cfg->system = SystemConfig::full_profile();
        } else {
            delete cfg;
            return fail(NISAC_ERR_INVALID_ARGUMENT,
                        "profile must be ci or full");
        }
        *out = cfg;
        return NISAC_OK;
    });
}

nisac_status nisac_config_load(const char *path, nisac_config **out) {
    return guarded([&]() {
        if (path == nullptr || out == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        auto *cfg = new nisac_config;
        try {
            cfg->system = SystemConfig::load_file(path);
        } catch (const std::exception &e) {
            delete cfg;
            return fail(NISAC_ERR_IO, e.what());
        }
        *out = cfg;
        return NISAC_OK;
    });
}

nisac_status nisac_config_set_seed(nisac_config *cfg, uint64_t seed) {
    if (cfg == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null config");
    }
    cfg->system.rng_seed = seed;
    return NISAC_OK;
}

nisac_status nisac_config_set_q_streams(nisac_config *cfg, int q) {
    if (cfg == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null config");
    }
    cfg->system.q_streams = q;
    return NISAC_OK;
}

nisac_status nisac_config_set(nisac_config *cfg, const char *key,
                              const char *value) {
    return guarded([&]() {
        if (cfg == nullptr || key == nullptr || value == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        const std::string k(key), v(value);
        SystemConfig &sys = cfg->system;
        MuSolveConfig &solver = cfg->solver;
        if (k == "n_antennas") {
            sys.n_antennas = std::stoi(v);
        } else if (k == "n_users") {
            sys.n_users = std::stoi(v);
        } else if (k == "q_streams") {
            sys.q_streams = std::stoi(v);
        } else if (k == "beam_width_deg") {
            sys.beam_width_deg = std::stod(v);
        } else if (k == "pt_dbm") {
            sys.pt_dbm = std::stod(v);
        } else if (k == "noise_dbm") {
            sys.noise_dbm = std::stod(v);
        } else if (k == "pathloss_db") {
            sys.pathloss_db = std::stod(v);
        } else if (k == "rng_seed") {
            sys.rng_seed = std::stoull(v);
        } else if (k == "zeta0") {
            solver.zeta0 = std::stod(v);
        } else if (k == "rho") {
            solver.rho = std::stod(v);
        } else if (k == "tau1") {
            solver.tau1 = std::stod(v);
        } else if (k == "tau2") {
            solver.tau2 = std::stod(v);
        } else if (k == "max_inner") {
            solver.max_inner = std::stoi(v);
        } else if (k == "max_outer") {
            solver.max_outer = std::stoi(v);
        } else if (k == "conic_tol") {
            solver.fp.conic_tol = std::stod(v);
        } else if (k == "log_mode") {
            if (v == "exp") {
                solver.fp.log_mode = LogMode::exp_cone;
            } else if (v == "sca") {
                solver.fp.log_mode = LogMode::soc_tangent;
            } else {
                return fail(NISAC_ERR_INVALID_ARGUMENT,
                            "log_mode must be exp or sca");
            }
        } else {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "unknown key: " + k);
        }
        return NISAC_OK;
    });
}

void nisac_config_free(nisac_config *cfg) { delete cfg; }

nisac_status nisac_scenario_create(const nisac_config *cfg,
                                   uint64_t realization,
                                   nisac_scenario **out) {
    return guarded([&]() {
        if (cfg == nullptr || out == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        cfg->system.validate();
        auto *sc = new nisac_scenario;
        sc->system = cfg->system;
        sc->solver = cfg->solver;
        sc->channels = sample_channels(
            cfg->system, derive_seed(cfg->system.rng_seed, realization));
        sc->spec = build_beampattern_spec(cfg->system);
        *out = sc;
        return NISAC_OK;
    });
}

nisac_status nisac_scenario_reference_loss(const nisac_scenario *sc,
                                           double *out) {
    if (sc == nullptr || out == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = sc->spec.reference_loss;
    return NISAC_OK;
}

nisac_status nisac_scenario_grid_size(const nisac_scenario *sc, int *out) {
    if (sc == nullptr || out == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = sc->spec.grid_size();
    return NISAC_OK;
}

nisac_status nisac_scenario_reference_pattern(const nisac_scenario *sc,
                                              double *angles_deg,
                                              double *pattern, size_t len) {
    if (sc == nullptr || angles_deg == nullptr || pattern == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    const int n = sc->spec.grid_size();
    if (len < static_cast<size_t>(n)) {
        return fail(NISAC_ERR_BUFFER_TOO_SMALL, "grid buffer too small");
    }
    for (int l = 0; l < n; ++l) {
        angles_deg[l] = sc->spec.grid.angles_rad(l) * 180.0 / M_PI;
        pattern[l] = sc->spec.reference_pattern(l);
    }
    return NISAC_OK;
}

void nisac_scenario_free(nisac_scenario *sc) { delete sc; }

nisac_status nisac_solve_multiuser(const nisac_scenario *sc,
                                   const char *scheme, double eps1,
                                   nisac_solution **out) {
    return guarded([&]() {
        if (sc == nullptr || scheme == nullptr || out == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        MuSolveConfig cfg = sc->solver;
        cfg.scheme = scheme_from_string(scheme);
        cfg.q_streams = (cfg.scheme == Scheme::noma ||
                         cfg.scheme == Scheme::noma_senic)
                            ? sc->system.q_streams
                            : 0;
        cfg.eps1 = eps1;
        auto *sol = new nisac_solution;
        sol->multiuser = true;
        sol->trace = solve_mu_best(sc->channels, sc->spec, cfg);
        sol->spec_copy = sc->spec;
        sol->spec = &sol->spec_copy;
        *out = sol;
        return sol->trace.status == MuStatus::converged
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER,
                          std::string("solve ended with status ") +
                              to_string(sol->trace.status));
    });
}

nisac_status nisac_solve_single_user(const nisac_scenario *sc, int variant,
                                     double eps2_bits,
                                     nisac_solution **out) {
    return guarded([&]() {
        if (sc == nullptr || out == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        if (sc->system.n_users != 1) {
            return fail(NISAC_ERR_INVALID_ARGUMENT,
                        "single-user solve needs n_users = 1");
        }
        const double pt = sc->system.pt_watts();
        SuSolve res;
        switch (variant) {
        case 0:
            res = solve_p41(sc->channels, sc->spec, eps2_bits, pt, 1e-10);
            break;
        case 1:
            res = solve_p61(sc->channels, sc->spec, eps2_bits, pt, 0, 1e-10);
            break;
        case 2:
            res = solve_p61(sc->channels, sc->spec, eps2_bits, pt, 1, 1e-10);
            break;
        default:
            return fail(NISAC_ERR_INVALID_ARGUMENT,
                        "variant must be 0, 1 or 2");
        }
        auto *sol = new nisac_solution;
        sol->multiuser = false;
        sol->su = res;
        sol->su_loss = res.loss;
        sol->spec_copy = sc->spec;
        sol->spec = &sol->spec_copy;
        *out = sol;
        return res.status == conic::SolveStatus::optimal
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER,
                          std::string("solve ended with status ") +
                              conic::to_string(res.status));
    });
}

nisac_status nisac_solution_throughput(const nisac_solution *sol,
                                       double *out) {
    if (sol == nullptr || out == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    if (!sol->multiuser) {
        return fail(NISAC_ERR_INVALID_ARGUMENT,
                    "throughput is a multiuser result field");
    }
    *out = sol->trace.report.throughput;
    return NISAC_OK;
}

nisac_status nisac_solution_loss(const nisac_solution *sol, double *out) {
    if (sol == nullptr || out == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = sol->multiuser ? sol->trace.final_loss : sol->su_loss;
    return NISAC_OK;
}

nisac_status nisac_solution_status(const nisac_solution *sol, char *buf,
                                   size_t len) {
    if (sol == nullptr || buf == nullptr) {
        return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
    }
    const char *text = sol->multiuser ? to_string(sol->trace.status)
                                      : conic::to_string(sol->su.status);
    if (len <= std::strlen(text)) {
        return fail(NISAC_ERR_BUFFER_TOO_SMALL, "status buffer too small");
    }
    std::strcpy(buf, text);
    return NISAC_OK;
}

nisac_status nisac_solution_beampattern(const nisac_solution *sol,
                                        double *pattern, size_t len) {
    return guarded([&]() {
        if (sol == nullptr || pattern == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        const int n = sol->spec->grid_size();
        if (len < static_cast<size_t>(n)) {
            return fail(NISAC_ERR_BUFFER_TOO_SMALL, "buffer too small");
        }
        const Eigen::MatrixXcd cov =
            sol->multiuser ? sol->trace.solution.total_covariance()
                           : sol->su.total_cov;
        if (cov.size() == 0) {
            return fail(NISAC_ERR_SOLVER, "no solution values available");
        }
        const Eigen::VectorXd p = beampattern(cov, sol->spec->grid);
        for (int l = 0; l < n; ++l) {
            pattern[l] = p(l);
        }
        return NISAC_OK;
    });
}

void nisac_solution_free(nisac_solution *sol) { delete sol; }

nisac_status nisac_run_tradeoff(const nisac_config *cfg,
                                const char *schemes_csv, const char *eps_csv,
                                int realizations, const char *out_dir,
                                int plot) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.schemes = parse_schemes(schemes_csv);
        options.eps_grid = parse_eps(eps_csv);
        options.realizations = realizations > 0 ? realizations : 10;
        options.out_dir = out_dir;
        options.plot = plot != 0;
        const TradeoffCurve curve = run_tradeoff(options);
        return curve.all_converged()
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER,
                          "one or more records did not converge");
    });
}

nisac_status nisac_run_beampattern(const nisac_config *cfg,
                                   const char *schemes_csv,
                                   const char *eps_csv,
                                   double target_throughput,
                                   const char *out_dir, int plot) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.schemes = parse_schemes(schemes_csv);
        options.eps_grid = parse_eps(eps_csv);
        options.out_dir = out_dir;
        options.plot = plot != 0;
        const TradeoffCurve curve =
            run_beampattern(options, target_throughput);
        return curve.all_converged()
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER,
                          "one or more records did not converge");
    });
}

nisac_status nisac_run_q_sweep(const nisac_config *cfg, const char *q_csv,
                               const char *eps_csv, int realizations,
                               const char *out_dir) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        std::vector<int> q_values;
        if (q_csv && *q_csv) {
            for (const auto &item : split_csv(q_csv)) {
                q_values.push_back(std::stoi(item));
            }
        } else {
            for (int q = 1; q <= cfg->system.n_antennas; ++q) {
                q_values.push_back(q);
            }
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.eps_grid = parse_eps(eps_csv);
        options.realizations = realizations > 0 ? realizations : 10;
        options.out_dir = out_dir;
        const TradeoffCurve curve = run_q_sweep(options, q_values);
        return curve.all_converged()
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER,
                          "one or more records did not converge");
    });
}

nisac_status nisac_run_single_user(const nisac_config *cfg, int grid_points,
                                   double beampattern_rate_bits,
                                   const char *out_dir, int plot) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.out_dir = out_dir;
        options.plot = plot != 0;
        const SuRunResult result = run_single_user(
            options, grid_points > 1 ? grid_points : 9,
            beampattern_rate_bits > 0.0 ? beampattern_rate_bits : 9.0);
        return result.ok ? NISAC_OK
                         : fail(NISAC_ERR_SOLVER,
                                "single-user sweep recorded failures");
    });
}

nisac_status nisac_run_convergence(const nisac_config *cfg,
                                   const char *eps_csv, const char *out_dir,
                                   int plot) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.eps_grid = parse_eps(eps_csv);
        options.out_dir = out_dir;
        options.plot = plot != 0;
        const TradeoffCurve curve = run_convergence(options);
        return curve.all_converged()
                   ? NISAC_OK
                   : fail(NISAC_ERR_SOLVER, "run did not converge");
    });
}

nisac_status nisac_run_oracle_check(const nisac_config *cfg, int resolution,
                                    const char *out_dir) {
    return guarded([&]() {
        if (cfg == nullptr || out_dir == nullptr) {
            return fail(NISAC_ERR_INVALID_ARGUMENT, "null argument");
        }
        HarnessOptions options;
        options.system = cfg->system;
        options.solver = cfg->solver;
        options.out_dir = out_dir;
        const auto rows =
            run_oracle_check(options, resolution > 1 ? resolution : 200);
        for (const auto &row : rows) {
            if (row.qsdp_loss > row.oracle_loss * (1.0 + 1e-6) + 1e-12) {
                // the exhaustive search is a restriction; the program must
                // never do worse than it
                return fail(NISAC_ERR_SOLVER,
                            "solver loss exceeded the exhaustive bound");
            }
        }
        return NISAC_OK;
    });
}

} // extern "C"
