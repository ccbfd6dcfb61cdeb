#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvsim/types.hpp"

namespace cvsim {

/// Thrown for any configuration, plan, or command that fails validation. The message
/// names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical constants, geometry, and demand for one world. Units are SI (m, s, m/s)
/// except theta, which is meters of headway per km/h of leader speed.
struct SimConfig {
    double tick_s = 0.1;
    double a_max = 2.5;
    double v_limit = 16.667;
    double v_min = 0.0;
    double desired_speed_factor = 0.9;
    double s_reaction = 150.0;
    double theta = 0.55;
    double s_headway_min = 5.5;
    double s_stop = 5.5;
    double v_dis = 3.0;
    double vehicle_length = 4.5;
    double noise_sigma = 0.2;
    double approach_length = 500.0;
    double exit_length = 50.0;
    double stop_speed_threshold = 1.389;
    std::uint64_t seed = 1;
    std::array<double, kApproachCount> flows{0.0, 0.0, 0.0, 0.0};  // veh/h, W,S,E,N
    double equipped_ratio = 0.0;

    double desired_speed() const noexcept { return desired_speed_factor * v_limit; }
    double stop_line() const noexcept { return approach_length; }
    double flow(Approach a) const noexcept { return flows[static_cast<std::size_t>(a)]; }
};

/// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate(const SimConfig& cfg);

/// Throws ConfigError with all violations joined when cfg is invalid.
void require_valid(const SimConfig& cfg);

nlohmann::json to_json(const SimConfig& cfg);

/// Fields absent from `j` keep their defaults from `base`. Unknown fields are rejected.
SimConfig config_from_json(const nlohmann::json& j, SimConfig base = {});

SimConfig load_config_file(const std::string& path);

}  // namespace cvsim
