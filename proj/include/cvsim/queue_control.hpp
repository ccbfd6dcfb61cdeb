#pragma once

#include <optional>
#include <vector>

#include "cvsim/config.hpp"
#include "cvsim/driver_model.hpp"
#include "cvsim/vehicle.hpp"

namespace cvsim {

/// Which rule of the head controller produced a command.
enum class HeadBranch {
    GreenClear,      // (a) q_block empty, green: natural driving
    StopLine,        // (b) q_block empty, red, within s_reaction: stop at the line
    Committed,       // (b) but the line cannot be reached at a_max: keeps driving
    RedFar,          // (b) q_block empty, red, beyond s_reaction: natural driving
    BehindQueue,     // (c) q_block tail within s_reaction: stop s_stop behind it
    QueueFar,        // (d) q_block tail beyond s_reaction: natural driving
};

struct HeadCommand {
    double accel = 0.0;
    Regime regime = Regime::Free;
    HeadBranch branch = HeadBranch::GreenClear;
    bool stopping_for_signal = false;  // velocity floor relaxed to 0
    bool emergency = false;
    std::optional<double> stop_target;
};

/// Gap to the nearest vehicle ahead of the q_in head: the q_block tail if any, else the
/// rearmost vehicle of the exit segment.
std::optional<GapState> head_leader_gap(const Lane& lane);

/// Stop-target controller used by branches (b) and (c): brake_to(target), except that a
/// car well below the half-a_max braking envelope (v < 0.5 * sqrt(a_max * gap)) first
/// moves up, so a car that came to rest short of its target still closes the gap.
double approach_stop(double v, double head_pos, double target, const SimConfig& cfg, bool* emergency = nullptr);

/// Acceleration for the head of q_in. Yellow is handled as red. Requires q_in nonempty.
HeadCommand control_qin_head(const Lane& lane, Color color, const SimConfig& cfg);

struct QueueEvents {
    std::vector<VehicleId> joined;
    std::vector<Vehicle> departed;  // crossed the stop line this tick, crossed_time set
};

/// Stop-line update for one lane, called once per tick after the q_in motion:
///  green: every q_block car moves at v_dis;
///  red/yellow: q_block cars hold (cars that joined while moving brake to rest), and
///  the q_in head joins when within s_stop of the q_block tail or of the stop line.
/// Cars whose head_pos reaches the stop line move to the exit segment.
QueueEvents update_qblock(Lane& lane, Color color, double tick_end_time, const SimConfig& cfg);

}  // namespace cvsim
