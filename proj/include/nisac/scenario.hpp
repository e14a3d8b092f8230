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

#ifndef NISAC_SCENARIO_HPP
#define NISAC_SCENARIO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace nisac {

/// System-level configuration: array geometry, user population, sensing
/// targets and power/noise settings. Angles are stored the way they travel:
/// degrees in config files and CLI, radians on the internal angular grid.
struct SystemConfig {
    int n_antennas = 4;                       ///< N >= 1
    int n_users = 2;                          ///< K >= 1
    int q_streams = 1;                        ///< 0 <= Q <= N
    std::vector<double> targets_deg = {-60.0, 0.0, 60.0};
    double beam_width_deg = 10.0;             ///< desired beam width Delta
    double grid_step_rad = M_PI / 100.0;      ///< must divide pi exactly
    double pt_dbm = 20.0;                     ///< total transmit power budget
    double noise_dbm = -80.0;                 ///< receiver noise power
    double pathloss_db = 80.0;                ///< BS-user path loss
    std::uint64_t rng_seed = 1;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    /// Total power budget in linear watts.
    double pt_watts() const;

    /// Number of grid points L on [-pi/2, pi/2] inclusive.
    int grid_points() const;

    static SystemConfig ci_profile();   // N=4, K=2 desk scale
    static SystemConfig full_profile(); // N=8, K=5

    /// Key-value config file (see README for the schema).
    static SystemConfig load_file(const std::string &path);
    std::string to_key_value() const;
};

/// Normalized user channels. Entries are h_k / sigma_n, so the effective
/// noise power is exactly 1 and SINR expressions need no noise bookkeeping.
struct ChannelSet {
    std::vector<Eigen::VectorXcd> channels; ///< K vectors of length N
    double noise_power = 1.0;               ///< after normalization, always 1
    double raw_gain_db = 0.0;               ///< path loss used for the raw draw
    double noise_dbm = 0.0;                 ///< record for de-normalization

    int n_users() const { return static_cast<int>(channels.size()); }
    int n_antennas() const {
        return channels.empty() ? 0 : static_cast<int>(channels.front().size());
    }
};

/// Angular grid with precomputed steering vectors.
struct AngleGrid {
    Eigen::VectorXd angles_rad;             ///< L strictly increasing angles
    std::vector<Eigen::VectorXcd> steering; ///< a(theta_l), unit-modulus entries

    int size() const { return static_cast<int>(angles_rad.size()); }
};

/// Desired beampattern phi over an angular grid; values are exactly 0 or 1.
struct DesiredPattern {
    AngleGrid grid;
    Eigen::VectorXd phi;
};

/// ULA steering vector, entry n = exp(j*pi*n*sin(theta)) for half-wavelength
/// spacing. Rejects n_antennas == 0 and non-finite angles.
Eigen::VectorXcd make_steering_vector(int n_antennas, double theta_rad);

double dbm_to_watts(double dbm);

/// Grid over [-pi/2, pi/2] inclusive with the configured step.
AngleGrid make_angle_grid(const SystemConfig &cfg);

/// Raw Rayleigh-fading channels: i.i.d. CSCG entries with per-entry variance
/// 10^(-pathloss_db/10). Pure function of (cfg, seed).
std::vector<Eigen::VectorXcd> sample_raw_channels(const SystemConfig &cfg,
                                                  std::uint64_t seed);

/// Raw channels scaled by 1/sigma_n so the stored noise power is 1.
ChannelSet sample_channels(const SystemConfig &cfg, std::uint64_t seed);

/// Desired pattern: phi(theta_l) = 1 iff theta_l lies within +-Delta/2 of any
/// target (closed windows, union over targets).
DesiredPattern build_desired_pattern(const SystemConfig &cfg);

} // namespace nisac

#endif
