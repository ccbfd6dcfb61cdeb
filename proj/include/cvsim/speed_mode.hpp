#pragma once

#include <optional>
#include <string_view>

namespace cvsim {

/// Wall-clock pacing of the fixed 0.1 s tick. Physics never depends on it.
enum class SpeedMode { Fast, Medium, Slow, VerySlow, Headless };

/// Sim ticks per wall-clock second for a mode at the given tick length: Fast runs 100x
/// real time (1000 steps/s at 0.1 s), Medium 10x, Slow 1x, VerySlow 0.1x. Headless is
/// unpaced and returns 0.
double steps_per_second(SpeedMode mode, double tick_s) noexcept;

/// "fast", "medium", "slow", "very-slow", "headless".
std::string_view to_string(SpeedMode mode) noexcept;
std::optional<SpeedMode> parse_speed_mode(std::string_view s) noexcept;

}  // namespace cvsim
