/* SPDX-License-Identifier: Apache-2.0
 *
 * nisac: NOMA-inspired ISAC transmit beamforming library
 * Copyright (C) 2026 nisac developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the nisac shared library. All functions return a status
 * code (NISAC_OK on success); objects are opaque handles released with the
 * matching _free function. Handles are not thread-safe individually, but
 * distinct handles may be used from distinct threads.
 */

#ifndef NISAC_H
#define NISAC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nisac_status {
    NISAC_OK = 0,
    NISAC_ERR_INVALID_ARGUMENT = 1,
    NISAC_ERR_IO = 2,
    NISAC_ERR_SOLVER = 3,       /* solver failed or did not converge */
    NISAC_ERR_BUFFER_TOO_SMALL = 4,
    NISAC_ERR_INTERNAL = 5
} nisac_status;

typedef struct nisac_config nisac_config;     /* system + solver settings */
typedef struct nisac_scenario nisac_scenario; /* channels + pattern + fit  */
typedef struct nisac_solution nisac_solution; /* one finished design       */

const char *nisac_version(void);
/* Message for the most recent error on this thread ("" if none). */
const char *nisac_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* profile: "ci" (N=4, K=2) or "full" (N=8, K=5) */
nisac_status nisac_config_create(const char *profile, nisac_config **out);
nisac_status nisac_config_load(const char *path, nisac_config **out);
nisac_status nisac_config_set_seed(nisac_config *cfg, uint64_t seed);
nisac_status nisac_config_set_q_streams(nisac_config *cfg, int q);
/* key/value follow the config-file schema (see README) */
nisac_status nisac_config_set(nisac_config *cfg, const char *key,
                              const char *value);
void nisac_config_free(nisac_config *cfg);

/* ---- scenario: channels, desired pattern, reference fit ---------------- */

nisac_status nisac_scenario_create(const nisac_config *cfg,
                                   uint64_t realization,
                                   nisac_scenario **out);
nisac_status nisac_scenario_reference_loss(const nisac_scenario *sc,
                                           double *out);
nisac_status nisac_scenario_grid_size(const nisac_scenario *sc, int *out);
/* angles in degrees; buffers must hold grid_size doubles */
nisac_status nisac_scenario_reference_pattern(const nisac_scenario *sc,
                                              double *angles_deg,
                                              double *pattern, size_t len);
void nisac_scenario_free(nisac_scenario *sc);

/* ---- solvers ------------------------------------------------------------ */

/* scheme: noma | noma_senic | ideal_senic | no_senic | com_only */
nisac_status nisac_solve_multiuser(const nisac_scenario *sc,
                                   const char *scheme, double eps1,
                                   nisac_solution **out);
/* variant: 0 joint covariance, 1 split with cancellation, 2 split without */
nisac_status nisac_solve_single_user(const nisac_scenario *sc, int variant,
                                     double eps2_bits,
                                     nisac_solution **out);

nisac_status nisac_solution_throughput(const nisac_solution *sol,
                                       double *out);
nisac_status nisac_solution_loss(const nisac_solution *sol, double *out);
/* "converged", "iteration_cap", ... for the multiuser path;
 * "optimal", "infeasible", ... for the single-user path */
nisac_status nisac_solution_status(const nisac_solution *sol, char *buf,
                                   size_t len);
/* beampattern over the scenario grid; buffer must hold grid_size doubles */
nisac_status nisac_solution_beampattern(const nisac_solution *sol,
                                        double *pattern, size_t len);
void nisac_solution_free(nisac_solution *sol);

/* ---- experiment harness -------------------------------------------------
 * Batch commands mirror the CLI; they write CSV files into out_dir and
 * return NISAC_OK only when no record carries a failure status.
 * schemes_csv: comma list; eps_csv: comma list or "lo:hi:n" (log-spaced);
 * either may be "" for defaults. */

nisac_status nisac_run_tradeoff(const nisac_config *cfg,
                                const char *schemes_csv, const char *eps_csv,
                                int realizations, const char *out_dir,
                                int plot);
nisac_status nisac_run_beampattern(const nisac_config *cfg,
                                   const char *schemes_csv,
                                   const char *eps_csv,
                                   double target_throughput,
                                   const char *out_dir, int plot);
nisac_status nisac_run_q_sweep(const nisac_config *cfg, const char *q_csv,
                               const char *eps_csv, int realizations,
                               const char *out_dir);
nisac_status nisac_run_single_user(const nisac_config *cfg, int grid_points,
                                   double beampattern_rate_bits,
                                   const char *out_dir, int plot);
nisac_status nisac_run_convergence(const nisac_config *cfg,
                                   const char *eps_csv, const char *out_dir,
                                   int plot);
nisac_status nisac_run_oracle_check(const nisac_config *cfg, int resolution,
                                    const char *out_dir);

#ifdef __cplusplus
}
#endif

#endif
