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

#include "nisac/scenario.hpp"

#include "nisac/rng.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nisac {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string &value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        out.push_back(std::stod(item));
    }
    return out;
}

// Accepts plain floats and the "pi/<n>" shorthand used for grid steps.
double parse_angle_step(const std::string &value) {
    if (value.rfind("pi/", 0) == 0) {
        const double denom = std::stod(value.substr(3));
        return kPi / denom;
    }
    return std::stod(value);
}

} // namespace

void SystemConfig::validate() const {
    if (n_antennas < 1) {
        throw std::invalid_argument("n_antennas must be >= 1");
    }
    if (n_users < 1) {
        throw std::invalid_argument("n_users must be >= 1");
    }
    if (q_streams < 0 || q_streams > n_antennas) {
        throw std::invalid_argument("q_streams must satisfy 0 <= Q <= N");
    }
    if (!(beam_width_deg > 0.0)) {
        throw std::invalid_argument("beam_width_deg must be > 0");
    }
    if (!(grid_step_rad > 0.0)) {
        throw std::invalid_argument("grid_step_rad must be > 0");
    }
    const double ratio = kPi / grid_step_rad;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw std::invalid_argument("grid_step_rad must divide pi");
    }
    if (!std::isfinite(pt_dbm) || !std::isfinite(noise_dbm) ||
        !std::isfinite(pathloss_db)) {
        throw std::invalid_argument("power settings must be finite");
    }
    for (double t : targets_deg) {
        if (t < -90.0 || t > 90.0) {
            throw std::invalid_argument("targets must lie in [-90, 90] deg");
        }
    }
}

double SystemConfig::pt_watts() const { return dbm_to_watts(pt_dbm); }

int SystemConfig::grid_points() const {
    return static_cast<int>(std::round(kPi / grid_step_rad)) + 1;
}

SystemConfig SystemConfig::ci_profile() {
    SystemConfig cfg;
    cfg.n_antennas = 4;
    cfg.n_users = 2;
    cfg.q_streams = 1;
    return cfg;
}

SystemConfig SystemConfig::full_profile() {
    SystemConfig cfg;
    cfg.n_antennas = 8;
    cfg.n_users = 5;
    cfg.q_streams = 1;
    return cfg;
}

SystemConfig SystemConfig::load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    SystemConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "n_antennas") {
            cfg.n_antennas = std::stoi(value);
        } else if (key == "n_users") {
            cfg.n_users = std::stoi(value);
        } else if (key == "q_streams") {
            cfg.q_streams = std::stoi(value);
        } else if (key == "targets_deg") {
            cfg.targets_deg = parse_double_list(value);
        } else if (key == "beam_width_deg") {
            cfg.beam_width_deg = std::stod(value);
        } else if (key == "grid_step_rad") {
            cfg.grid_step_rad = parse_angle_step(value);
        } else if (key == "pt_dbm") {
            cfg.pt_dbm = std::stod(value);
        } else if (key == "noise_dbm") {
            cfg.noise_dbm = std::stod(value);
        } else if (key == "pathloss_db") {
            cfg.pathloss_db = std::stod(value);
        } else if (key == "rng_seed") {
            cfg.rng_seed = std::stoull(value);
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::string SystemConfig::to_key_value() const {
    std::ostringstream out;
    out << "n_antennas = " << n_antennas << "\n";
    out << "n_users = " << n_users << "\n";
    out << "q_streams = " << q_streams << "\n";
    out << "targets_deg = ";
    for (std::size_t i = 0; i < targets_deg.size(); ++i) {
        if (i) {
            out << ", ";
        }
        out << targets_deg[i];
    }
    out << "\n";
    out << "beam_width_deg = " << beam_width_deg << "\n";
    out << "grid_step_rad = pi/"
        << static_cast<int>(std::round(kPi / grid_step_rad)) << "\n";
    out << "pt_dbm = " << pt_dbm << "\n";
    out << "noise_dbm = " << noise_dbm << "\n";
    out << "pathloss_db = " << pathloss_db << "\n";
    out << "rng_seed = " << rng_seed << "\n";
    return out.str();
}

Eigen::VectorXcd make_steering_vector(int n_antennas, double theta_rad) {
    if (n_antennas < 1) {
        throw std::invalid_argument("steering vector needs n_antennas >= 1");
    }
    if (!std::isfinite(theta_rad)) {
        throw std::invalid_argument("steering angle must be finite");
    }
    Eigen::VectorXcd a(n_antennas);
    const double phase = kPi * std::sin(theta_rad);
    for (int n = 0; n < n_antennas; ++n) {
        a(n) = std::polar(1.0, phase * n);
    }
    return a;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

AngleGrid make_angle_grid(const SystemConfig &cfg) {
    cfg.validate();
    const int n_points = cfg.grid_points();
    AngleGrid grid;
    grid.angles_rad.resize(n_points);
    grid.steering.reserve(n_points);
    for (int l = 0; l < n_points; ++l) {
        // Endpoints land exactly on +-pi/2.
        const double theta =
            -kPi / 2.0 + kPi * static_cast<double>(l) / (n_points - 1);
        grid.angles_rad(l) = theta;
        grid.steering.push_back(make_steering_vector(cfg.n_antennas, theta));
    }
    return grid;
}

std::vector<Eigen::VectorXcd> sample_raw_channels(const SystemConfig &cfg,
                                                  std::uint64_t seed) {
    cfg.validate();
    const double entry_std =
        std::sqrt(std::pow(10.0, -cfg.pathloss_db / 10.0));
    SplitMix64 rng(seed);
    std::vector<Eigen::VectorXcd> raw(cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
        raw[k].resize(cfg.n_antennas);
        for (int n = 0; n < cfg.n_antennas; ++n) {
            raw[k](n) = entry_std * rng.next_cscg();
        }
    }
    return raw;
}

ChannelSet sample_channels(const SystemConfig &cfg, std::uint64_t seed) {
    ChannelSet set;
    set.channels = sample_raw_channels(cfg, seed);
    const double sigma_n = std::sqrt(dbm_to_watts(cfg.noise_dbm));
    for (auto &h : set.channels) {
        h /= sigma_n;
    }
    set.noise_power = 1.0;
    set.raw_gain_db = cfg.pathloss_db;
    set.noise_dbm = cfg.noise_dbm;
    return set;
}

DesiredPattern build_desired_pattern(const SystemConfig &cfg) {
    DesiredPattern pattern;
    pattern.grid = make_angle_grid(cfg);
    const int n_points = pattern.grid.size();
    pattern.phi = Eigen::VectorXd::Zero(n_points);
    const double half_width = cfg.beam_width_deg / 2.0;
    for (int l = 0; l < n_points; ++l) {
        const double theta_deg = pattern.grid.angles_rad(l) * 180.0 / kPi;
        for (double target : cfg.targets_deg) {
            // Closed windows; the epsilon keeps exact edge hits inside.
            if (std::abs(theta_deg - target) <= half_width + 1e-12) {
                pattern.phi(l) = 1.0;
                break;
            }
        }
    }
    return pattern;
}

} // namespace nisac
