#include "cvsim/queue_control.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "cvsim/kinematics.hpp"

namespace cvsim {

namespace {

// Slack on the join distance for floating-point ties.
constexpr double kJoinEps = 1e-9;
// A car at rest this close behind its stop target counts as arrived.
constexpr double kRestTolerance = 0.5;

GapState gap_to(const Vehicle& follower, const Vehicle& leader) {
    return {leader.head_pos - follower.head_pos, follower.velocity - leader.velocity, leader.accel_cmd,
            leader.velocity};
}

bool can_stop_within(double v, double distance, const SimConfig& cfg) {
    if (v <= 0.0) return true;
    if (distance <= 0.0) return false;
    return v * v / (2.0 * distance) <= cfg.a_max;
}

}  // namespace

std::optional<GapState> head_leader_gap(const Lane& lane) {
    assert(!lane.q_in.empty());
    const Vehicle& head = lane.q_in.front();
    if (!lane.q_block.empty()) return gap_to(head, lane.q_block.back());
    if (!lane.exiting.empty()) return gap_to(head, lane.exiting.back());
    return std::nullopt;
}

double approach_stop(double v, double head_pos, double target, const SimConfig& cfg, bool* emergency) {
    const double gap = target - head_pos;
    if (gap > kRestTolerance && v < 0.5 * std::sqrt(cfg.a_max * gap)) {
        return std::min(free_acceleration(v, cfg), 0.5 * cfg.a_max);
    }
    const BrakeCommand b = brake_to(v, head_pos, target, cfg);
    if (emergency) *emergency = b.emergency;
    return b.accel;
}

HeadCommand control_qin_head(const Lane& lane, Color color, const SimConfig& cfg) {
    assert(!lane.q_in.empty());
    const Vehicle& head = lane.q_in.front();
    const bool green = color == Color::Green;
    HeadCommand cmd;

    auto drive_naturally = [&](HeadBranch branch) {
        const DrivingDecision d = natural_acceleration(head_leader_gap(lane), head.velocity, cfg);
        cmd.accel = d.accel;
        cmd.regime = d.regime;
        cmd.branch = branch;
    };
    auto stop_at = [&](double target, HeadBranch branch) {
        cmd.accel = approach_stop(head.velocity, head.head_pos, target, cfg, &cmd.emergency);
        cmd.regime = Regime::Approach;
        cmd.branch = branch;
        cmd.stopping_for_signal = true;
        cmd.stop_target = target;
    };

    if (lane.q_block.empty()) {
        if (green) {
            drive_naturally(HeadBranch::GreenClear);
            return cmd;
        }
        const double to_line = cfg.stop_line() - head.head_pos;
        if (to_line >= cfg.s_reaction) {
            drive_naturally(HeadBranch::RedFar);
        } else if (!can_stop_within(head.velocity, to_line, cfg)) {
            drive_naturally(HeadBranch::Committed);
        } else {
            stop_at(cfg.stop_line(), HeadBranch::StopLine);
        }
        return cmd;
    }

    const double tail_pos = lane.q_block.back().head_pos;
    if (tail_pos - head.head_pos < cfg.s_reaction) {
        stop_at(tail_pos - cfg.s_stop, HeadBranch::BehindQueue);
    } else {
        drive_naturally(HeadBranch::QueueFar);
    }
    return cmd;
}

QueueEvents update_qblock(Lane& lane, Color color, double tick_end_time, const SimConfig& cfg) {
    QueueEvents ev;
    const double dt = cfg.tick_s;
    const double line = cfg.stop_line();

    if (color == Color::Green) {
        // Discharge at v_dis, but never closer than s_stop to the car ahead (the previous
        // q_block car, or the rearmost car already past the line).
        const Vehicle* ahead = lane.exiting.empty() ? nullptr : &lane.exiting.back();
        for (auto& v : lane.q_block) {
            double step = cfg.v_dis * dt;
            if (ahead) step = std::clamp(ahead->head_pos - cfg.s_stop - v.head_pos, 0.0, step);
            v.velocity = step / dt;
            v.head_pos += step;
            ahead = &v;
            v.accel_cmd = 0.0;
            v.accel_used = 0.0;
            v.settling = false;
            v.regime = Regime::Queued;
        }
    } else {
        for (std::size_t i = 0; i < lane.q_block.size(); ++i) {
            Vehicle& v = lane.q_block[i];
            if (!v.settling) {
                v.velocity = 0.0;
                v.accel_cmd = 0.0;
                v.accel_used = 0.0;
                continue;
            }
            const double target = i == 0 ? line : lane.q_block[i - 1].head_pos - cfg.s_stop;
            const double a = brake_to(v.velocity, v.head_pos, target, cfg).accel;
            const KinematicResult k = kinematics_step(v.velocity, a, dt, cfg, true);
            const double before = v.head_pos;
            v.head_pos += k.displacement;
            v.velocity = k.velocity;
            // The last braking tick can overshoot by < v*dt/2; settle on the target.
            if (v.velocity <= 0.0 && before <= target && v.head_pos > target) v.head_pos = target;
            v.accel_cmd = a;
            v.accel_used = k.accel_used;
            if (v.velocity <= 0.0) v.settling = false;
        }

        if (!lane.q_in.empty()) {
            Vehicle& head = lane.q_in.front();
            const bool empty = lane.q_block.empty();
            const double ref = empty ? line : lane.q_block.back().head_pos;
            const double dist = ref - head.head_pos;
            bool join = dist <= cfg.s_stop + kJoinEps || (head.velocity <= 0.0 && dist <= cfg.s_stop + kRestTolerance);
            if (empty && !can_stop_within(head.velocity, line - head.head_pos, cfg)) join = false;
            if (join) {
                head.regime = Regime::Queued;
                head.settling = head.velocity > 0.0;
                ev.joined.push_back(head.id);
                lane.q_block.push_back(std::move(head));
                lane.q_in.pop_front();
            }
        }
    }

    auto depart = [&](std::deque<Vehicle>& from) {
        Vehicle v = std::move(from.front());
        from.pop_front();
        v.crossed_time = tick_end_time;
        v.regime = Regime::Exiting;
        v.settling = false;
        ev.departed.push_back(v);
        lane.exiting.push_back(std::move(v));
    };
    while (!lane.q_block.empty() && lane.q_block.front().head_pos > line) depart(lane.q_block);
    while (lane.q_block.empty() && !lane.q_in.empty() && lane.q_in.front().head_pos > line) depart(lane.q_in);
    return ev;
}

}  // namespace cvsim
