#pragma once

#include "cvsim/config.hpp"
#include "cvsim/rng.hpp"

namespace cvsim {

struct KinematicResult {
    double velocity = 0.0;      // v'
    double displacement = 0.0;  // dx over the tick, never negative
    double accel_used = 0.0;    // (v' - v) / dt after all clamps
};

/// One tick of constant-acceleration motion with the platform clamps: the command is
/// limited to [-a_max, a_max], the new speed to [floor, v_limit] where floor is 0 when
/// `stopping_for_signal` and v_min otherwise. The displacement uses the realized
/// acceleration so position and speed stay consistent after clamping.
KinematicResult kinematics_step(double v, double a, double dt, const SimConfig& cfg,
                                bool stopping_for_signal = false) noexcept;

/// Adds N(0, noise_sigma^2) to the command. With sigma = 0 the command is returned
/// unchanged and no draw is consumed.
double apply_noise(double a_cmd, Rng& rng, const SimConfig& cfg);

struct BrakeCommand {
    double accel = 0.0;
    bool emergency = false;  // target already reached or passed while still moving
};

/// Constant deceleration that brings a vehicle at speed v to rest exactly at target_pos.
/// The result is not clamped here; the integrator limits it to -a_max.
BrakeCommand brake_to(double v, double head_pos, double target_pos, const SimConfig& cfg) noexcept;

}  // namespace cvsim
