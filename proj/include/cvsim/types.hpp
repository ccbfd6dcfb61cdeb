#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cvsim {

enum class Approach : std::uint8_t { W = 0, S = 1, E = 2, N = 3 };
enum class Movement : std::uint8_t { L = 0, C = 1, R = 2 };

inline constexpr std::size_t kApproachCount = 4;
inline constexpr std::size_t kMovementCount = 3;
inline constexpr std::size_t kLaneCount = kApproachCount * kMovementCount;

inline constexpr std::array<Approach, kApproachCount> kApproaches{Approach::W, Approach::S, Approach::E,
                                                                  Approach::N};

struct LaneId {
    Approach approach = Approach::W;
    Movement movement = Movement::L;

    // Position in the canonical order WL,WC,WR,SL,...,NR.
    constexpr std::size_t index() const noexcept {
        return static_cast<std::size_t>(approach) * kMovementCount + static_cast<std::size_t>(movement);
    }
    static constexpr LaneId from_index(std::size_t i) noexcept {
        return LaneId{static_cast<Approach>(i / kMovementCount), static_cast<Movement>(i % kMovementCount)};
    }
    friend constexpr bool operator==(LaneId, LaneId) = default;
};

inline constexpr std::array<LaneId, kLaneCount> all_lanes() noexcept {
    std::array<LaneId, kLaneCount> out{};
    for (std::size_t i = 0; i < kLaneCount; ++i) out[i] = LaneId::from_index(i);
    return out;
}

enum class Color : std::uint8_t { Red, Yellow, Green };

// Leave is produced by the regime classifier; Queued and Exiting are assigned by the
// stop-line logic.
enum class Regime : std::uint8_t { Free, Approach, Leave, Follow, Brake, Queued, Exiting };

std::string_view to_string(Approach a) noexcept;
std::string_view to_string(Color c) noexcept;
std::string_view to_string(Regime r) noexcept;
std::string to_string(LaneId id);

std::optional<Approach> parse_approach(std::string_view s) noexcept;
std::optional<Color> parse_color(std::string_view s) noexcept;
std::optional<LaneId> parse_lane(std::string_view s) noexcept;

}  // namespace cvsim
