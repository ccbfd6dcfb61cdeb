#pragma once

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "cvsim/config.hpp"
#include "cvsim/rng.hpp"
#include "cvsim/vehicle.hpp"

namespace cvsim {

struct FlowSetting {
    Approach approach = Approach::W;
    double flow_veh_per_hour = 0.0;

    double lambda_per_s() const noexcept { return flow_veh_per_hour / 3600.0; }
};

/// Mean number of arrivals in one tick, lambda * tick_s (0.05 for 1800 veh/h at 0.1 s).
double expected_arrivals_per_tick(double flow_veh_per_hour, double tick_s) noexcept;

/// Poisson arrival stream of one approach. Gaps are exponential with rate flow/3600 and
/// timestamps are kept exactly; every arrival whose timestamp falls inside [t, t + dt)
/// is reported by the sample for that tick.
class ArrivalProcess {
public:
    explicit ArrivalProcess(FlowSetting flow = {}) : flow_(flow) {}

    const FlowSetting& flow() const noexcept { return flow_; }

    /// Takes effect from the next sample; the pending gap is redrawn (memoryless).
    void set_flow(double veh_per_hour) noexcept;

    /// Arrival timestamps inside [t, t + dt), in increasing order.
    std::vector<double> sample(double t, double dt, Rng& rng);

private:
    FlowSetting flow_;
    std::optional<double> next_;
};

/// Builds a freshly generated vehicle at the spawn point: initial speed uniform on
/// [0.5, 1.0] * desired speed, equipped with probability equipped_ratio.
Vehicle make_vehicle(Approach approach, VehicleId id, double arrival_time, double now, Rng& rng,
                     const SimConfig& cfg);

/// Generated-but-unplaced vehicles, one FIFO per approach.
class PendingQueue {
public:
    std::deque<Vehicle>& of(Approach a) { return queues_[static_cast<std::size_t>(a)]; }
    const std::deque<Vehicle>& of(Approach a) const { return queues_[static_cast<std::size_t>(a)]; }
    std::size_t size() const noexcept;

private:
    std::array<std::deque<Vehicle>, kApproachCount> queues_;
};

/// Whether a vehicle spawned at head_pos 0 keeps the safe headway to a lane's last
/// vehicle: X_last - 0 >= S_safe(v_last). An empty lane is always feasible.
bool spawn_feasible(const Lane& lane, const SimConfig& cfg) noexcept;

/// Largest entry speed from which the newcomer can stop s_stop behind the lane's last
/// vehicle even if that vehicle brakes at a_max. Infinite for an empty lane.
double safe_entry_speed(const Lane& lane, const SimConfig& cfg) noexcept;

struct Placement {
    LaneId lane{};
    double entry_speed = 0.0;
};

/// Chooses uniformly among the feasible lanes of the vehicle's approach. nullopt means
/// no lane is feasible and the vehicle stays pending. One draw is consumed whenever at
/// least one lane is feasible.
std::optional<Placement> assign_lane(const Vehicle& v, std::span<const Lane* const> approach_lanes, Rng& rng,
                                     const SimConfig& cfg);

}  // namespace cvsim
