#include "cvsim/signal.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cvsim/config.hpp"

namespace cvsim {

namespace {

constexpr double kTimeEps = 1e-9;

bool is_east_west(LaneId id) { return id.approach == Approach::E || id.approach == Approach::W; }

void merge_equal_neighbours(std::vector<Segment>& segs) {
    std::vector<Segment> out;
    for (const auto& s : segs) {
        if (!out.empty() && out.back().color == s.color) {
            out.back().end_s = s.end_s;
        } else {
            out.push_back(s);
        }
    }
    segs = std::move(out);
}

}  // namespace

SignalPlan two_phase_plan(double cycle_s, double ew_green_s) {
    SignalPlan p;
    p.cycle_s = cycle_s;
    for (auto id : all_lanes()) {
        const bool ew = is_east_west(id);
        auto& segs = p.of(id);
        if (ew_green_s > 0) segs.push_back({ew ? Color::Green : Color::Red, 0.0, ew_green_s});
        if (ew_green_s < cycle_s) segs.push_back({ew ? Color::Red : Color::Green, ew_green_s, cycle_s});
    }
    return p;
}

SignalPlan default_plan() { return two_phase_plan(90.0, 45.0); }

SignalPlan uniform_plan(double cycle_s, Color color) {
    SignalPlan p;
    p.cycle_s = cycle_s;
    for (auto& segs : p.lanes) segs = {{color, 0.0, cycle_s}};
    return p;
}

double time_in_cycle(const SignalPlan& plan, double t) {
    double tau = std::fmod(t + kTimeEps, plan.cycle_s);
    if (tau < 0) tau += plan.cycle_s;
    return tau;
}

Color color_at(const SignalPlan& plan, LaneId lane, double t) {
    const double tau = time_in_cycle(plan, t);
    const auto& segs = plan.of(lane);
    for (const auto& s : segs) {
        if (tau >= s.start_s && tau < s.end_s) return s.color;
    }
    return segs.empty() ? Color::Red : segs.back().color;
}

SignalPlan set_color_behind(const SignalPlan& plan, const std::vector<LaneId>& lanes, double cursor, Color color) {
    if (!(cursor >= 0.0 && cursor < plan.cycle_s)) {
        std::ostringstream os;
        os << "cursor: " << cursor << " outside [0, " << plan.cycle_s << ")";
        throw ConfigError(os.str());
    }
    SignalPlan out = plan;
    for (auto id : lanes) {
        std::vector<Segment> segs;
        for (const auto& s : plan.of(id)) {
            if (s.start_s >= cursor) break;
            segs.push_back({s.color, s.start_s, std::min(s.end_s, cursor)});
        }
        segs.push_back({color, cursor, plan.cycle_s});
        merge_equal_neighbours(segs);
        out.of(id) = std::move(segs);
    }
    return out;
}

std::vector<PlanViolation> validate_plan(const SignalPlan& plan) {
    std::vector<PlanViolation> out;
    if (!(plan.cycle_s > 0.0) || !std::isfinite(plan.cycle_s)) {
        out.push_back({LaneId{}, 0.0, plan.cycle_s, "cycle_s must be a positive number"});
        return out;
    }
    for (auto id : all_lanes()) {
        const auto& segs = plan.of(id);
        if (segs.empty()) {
            out.push_back({id, 0.0, plan.cycle_s, "lane has no segments"});
            continue;
        }
        double expected = 0.0;
        for (const auto& s : segs) {
            if (!(s.end_s > s.start_s)) {
                out.push_back({id, s.start_s, s.end_s, "empty or reversed segment"});
            }
            if (s.start_s > expected + kTimeEps) {
                out.push_back({id, expected, s.start_s, "gap in coverage"});
            } else if (s.start_s < expected - kTimeEps) {
                out.push_back({id, s.start_s, expected, "overlapping segments"});
            }
            expected = std::max(expected, s.end_s);
        }
        if (expected < plan.cycle_s - kTimeEps) {
            out.push_back({id, expected, plan.cycle_s, "gap in coverage"});
        } else if (expected > plan.cycle_s + kTimeEps) {
            out.push_back({id, plan.cycle_s, expected, "segment extends past cycle_s"});
        }
    }
    return out;
}

std::string describe(const PlanViolation& v) {
    std::ostringstream os;
    os << "lane " << to_string(v.lane) << " [" << v.start_s << ", " << v.end_s << "): " << v.message;
    return os.str();
}

void require_valid(const SignalPlan& plan) {
    auto v = validate_plan(plan);
    if (!v.empty()) throw ConfigError("invalid plan: " + describe(v.front()));
}

nlohmann::json to_json(const SignalPlan& plan) {
    nlohmann::json lanes = nlohmann::json::object();
    for (auto id : all_lanes()) {
        nlohmann::json segs = nlohmann::json::array();
        for (const auto& s : plan.of(id)) {
            segs.push_back({{"color", to_string(s.color)}, {"start_s", s.start_s}, {"end_s", s.end_s}});
        }
        lanes[to_string(id)] = std::move(segs);
    }
    return {{"cycle_s", plan.cycle_s}, {"lanes", std::move(lanes)}};
}

SignalPlan plan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("plan: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "cycle_s" && it.key() != "lanes") throw ConfigError("plan." + it.key() + ": unknown field");
    }
    if (!j.contains("cycle_s") || !j["cycle_s"].is_number()) throw ConfigError("plan.cycle_s: expected a number");
    if (!j.contains("lanes") || !j["lanes"].is_object()) throw ConfigError("plan.lanes: expected an object");
    SignalPlan p;
    p.cycle_s = j["cycle_s"].get<double>();
    std::array<bool, kLaneCount> seen{};
    for (auto it = j["lanes"].begin(); it != j["lanes"].end(); ++it) {
        auto id = parse_lane(it.key());
        if (!id) throw ConfigError("plan.lanes." + it.key() + ": unknown lane");
        const std::string where = "plan.lanes." + it.key();
        if (!it->is_array()) throw ConfigError(where + ": expected an array of segments");
        auto& segs = p.of(*id);
        for (const auto& s : *it) {
            if (!s.is_object() || !s.contains("color") || !s["color"].is_string() || !s.contains("start_s") ||
                !s["start_s"].is_number() || !s.contains("end_s") || !s["end_s"].is_number()) {
                throw ConfigError(where + ": segment needs color, start_s, end_s");
            }
            auto c = parse_color(s["color"].get<std::string>());
            if (!c) throw ConfigError(where + ": unknown color '" + s["color"].get<std::string>() + "'");
            segs.push_back({*c, s["start_s"].get<double>(), s["end_s"].get<double>()});
        }
        seen[id->index()] = true;
    }
    for (auto id : all_lanes()) {
        if (!seen[id.index()]) throw ConfigError("plan.lanes." + to_string(id) + ": missing lane");
    }
    return p;
}

SignalPlan parse_valid_plan(const nlohmann::json& j) {
    auto p = plan_from_json(j);
    require_valid(p);
    return p;
}

SignalPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("plan: cannot read file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("plan: malformed JSON in '" + path + "': " + e.what());
    }
    return parse_valid_plan(j);
}

}  // namespace cvsim
