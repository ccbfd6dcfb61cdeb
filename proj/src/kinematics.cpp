#include "cvsim/kinematics.hpp"

#include <algorithm>

namespace cvsim {

KinematicResult kinematics_step(double v, double a, double dt, const SimConfig& cfg,
                                bool stopping_for_signal) noexcept {
    const double a_clamped = std::clamp(a, -cfg.a_max, cfg.a_max);
    const double floor = stopping_for_signal ? 0.0 : cfg.v_min;
    const double v_next = std::clamp(v + a_clamped * dt, floor, cfg.v_limit);
    const double a_used = (v_next - v) / dt;
    const double dx = v * dt + 0.5 * a_used * dt * dt;
    return {v_next, std::max(dx, 0.0), a_used};
}

double apply_noise(double a_cmd, Rng& rng, const SimConfig& cfg) {
    if (cfg.noise_sigma == 0.0) return a_cmd;
    return a_cmd + cfg.noise_sigma * rng.standard_normal();
}

BrakeCommand brake_to(double v, double head_pos, double target_pos, const SimConfig& cfg) noexcept {
    if (v <= 0.0) return {0.0, false};
    const double gap = target_pos - head_pos;
    if (gap <= 0.0) return {-cfg.a_max, true};
    return {-(v * v) / (2.0 * gap), false};
}

}  // namespace cvsim
