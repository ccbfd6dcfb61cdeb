#include "cvsim/speed_mode.hpp"

namespace cvsim {

double steps_per_second(SpeedMode mode, double tick_s) noexcept {
    switch (mode) {
        case SpeedMode::Fast: return 100.0 / tick_s;
        case SpeedMode::Medium: return 10.0 / tick_s;
        case SpeedMode::Slow: return 1.0 / tick_s;
        case SpeedMode::VerySlow: return 0.1 / tick_s;
        case SpeedMode::Headless: return 0.0;
    }
    return 0.0;
}

std::string_view to_string(SpeedMode mode) noexcept {
    switch (mode) {
        case SpeedMode::Fast: return "fast";
        case SpeedMode::Medium: return "medium";
        case SpeedMode::Slow: return "slow";
        case SpeedMode::VerySlow: return "very-slow";
        case SpeedMode::Headless: return "headless";
    }
    return "headless";
}

std::optional<SpeedMode> parse_speed_mode(std::string_view s) noexcept {
    for (SpeedMode m : {SpeedMode::Fast, SpeedMode::Medium, SpeedMode::Slow, SpeedMode::VerySlow, SpeedMode::Headless}) {
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

}  // namespace cvsim
