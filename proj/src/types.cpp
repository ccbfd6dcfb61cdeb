#include "cvsim/types.hpp"

namespace cvsim {

std::string_view to_string(Approach a) noexcept {
    switch (a) {
        case Approach::W: return "W";
        case Approach::S: return "S";
        case Approach::E: return "E";
        case Approach::N: return "N";
    }
    return "?";
}

std::string_view to_string(Color c) noexcept {
    switch (c) {
        case Color::Red: return "red";
        case Color::Yellow: return "yellow";
        case Color::Green: return "green";
    }
    return "?";
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Free: return "free";
        case Regime::Approach: return "approach";
        case Regime::Leave: return "leave";
        case Regime::Follow: return "follow";
        case Regime::Brake: return "brake";
        case Regime::Queued: return "queued";
        case Regime::Exiting: return "exiting";
    }
    return "?";
}

std::string to_string(LaneId id) {
    static constexpr char kMove[] = {'L', 'C', 'R'};
    std::string out(to_string(id.approach));
    out.push_back(kMove[static_cast<std::size_t>(id.movement)]);
    return out;
}

std::optional<Approach> parse_approach(std::string_view s) noexcept {
    if (s == "W") return Approach::W;
    if (s == "S") return Approach::S;
    if (s == "E") return Approach::E;
    if (s == "N") return Approach::N;
    return std::nullopt;
}

std::optional<Color> parse_color(std::string_view s) noexcept {
    if (s == "red") return Color::Red;
    if (s == "yellow") return Color::Yellow;
    if (s == "green") return Color::Green;
    return std::nullopt;
}

std::optional<LaneId> parse_lane(std::string_view s) noexcept {
    if (s.size() != 2) return std::nullopt;
    auto a = parse_approach(s.substr(0, 1));
    if (!a) return std::nullopt;
    Movement m;
    switch (s[1]) {
        case 'L': m = Movement::L; break;
        case 'C': m = Movement::C; break;
        case 'R': m = Movement::R; break;
        default: return std::nullopt;
    }
    return LaneId{*a, m};
}

}  // namespace cvsim
