#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvsim/config.hpp"
#include "cvsim/types.hpp"

namespace cvsim {

struct Segment {
    Color color = Color::Red;
    double start_s = 0.0;
    double end_s = 0.0;
    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Fixed-time plan: one cyclic timeline of colored segments per lane. Segments of a lane
/// are sorted, non-overlapping, and cover [0, cycle_s) exactly.
struct SignalPlan {
    double cycle_s = 90.0;
    std::array<std::vector<Segment>, kLaneCount> lanes;

    const std::vector<Segment>& of(LaneId id) const { return lanes[id.index()]; }
    std::vector<Segment>& of(LaneId id) { return lanes[id.index()]; }
    friend bool operator==(const SignalPlan&, const SignalPlan&) = default;
};

struct PlanViolation {
    LaneId lane{};
    double start_s = 0.0;
    double end_s = 0.0;
    std::string message;
};

/// 90 s cycle, 45/45 split: E/W lanes green on [0,45), N/S lanes green on [45,90).
SignalPlan default_plan();

/// Same two-phase structure with an arbitrary cycle and E/W green share.
SignalPlan two_phase_plan(double cycle_s, double ew_green_s);

/// Every lane gets the same single-color timeline.
SignalPlan uniform_plan(double cycle_s, Color color);

/// Color of the segment containing (t mod cycle_s); a segment end belongs to the next
/// segment.
Color color_at(const SignalPlan& plan, LaneId lane, double t);

/// Position of t within the cycle.
double time_in_cycle(const SignalPlan& plan, double t);

/// Paints [cursor, cycle_s) with `color` on each selected lane and merges equal
/// neighbours. Throws ConfigError (plan untouched) if cursor is outside [0, cycle_s).
SignalPlan set_color_behind(const SignalPlan& plan, const std::vector<LaneId>& lanes, double cursor, Color color);

std::vector<PlanViolation> validate_plan(const SignalPlan& plan);

/// Throws ConfigError naming the first violation.
void require_valid(const SignalPlan& plan);

std::string describe(const PlanViolation& v);

nlohmann::json to_json(const SignalPlan& plan);

/// Parses a plan document without checking its timeline invariants:
///   {"cycle_s": 90, "lanes": {"WL": [{"color": "green", "start_s": 0, "end_s": 45}, ...], ...}}
/// All 12 lanes must be present. Structural errors throw ConfigError.
SignalPlan plan_from_json(const nlohmann::json& j);

/// plan_from_json followed by require_valid.
SignalPlan parse_valid_plan(const nlohmann::json& j);

SignalPlan load_plan_file(const std::string& path);

}  // namespace cvsim
