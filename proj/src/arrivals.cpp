#include "cvsim/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvsim/driver_model.hpp"

namespace cvsim {

double expected_arrivals_per_tick(double flow_veh_per_hour, double tick_s) noexcept {
    return flow_veh_per_hour / 3600.0 * tick_s;
}

void ArrivalProcess::set_flow(double veh_per_hour) noexcept {
    flow_.flow_veh_per_hour = veh_per_hour;
    next_.reset();
}

std::vector<double> ArrivalProcess::sample(double t, double dt, Rng& rng) {
    std::vector<double> out;
    const double rate = flow_.lambda_per_s();
    if (rate <= 0.0) return out;
    if (!next_) next_ = t + rng.exponential(rate);
    while (*next_ < t + dt) {
        out.push_back(*next_);
        *next_ += rng.exponential(rate);
    }
    return out;
}

Vehicle make_vehicle(Approach approach, VehicleId id, double arrival_time, double now, Rng& rng,
                     const SimConfig& cfg) {
    Vehicle v;
    v.id = id;
    v.lane = LaneId{approach, Movement::C};
    v.arrival_time = arrival_time;
    v.spawn_time = now;
    v.init_velocity = rng.uniform(0.5, 1.0) * cfg.desired_speed();
    v.velocity = v.init_velocity;
    v.equipped = rng.bernoulli(cfg.equipped_ratio);
    return v;
}

std::size_t PendingQueue::size() const noexcept {
    std::size_t n = 0;
    for (const auto& q : queues_) n += q.size();
    return n;
}

bool spawn_feasible(const Lane& lane, const SimConfig& cfg) noexcept {
    const Vehicle* last = lane.last_approach_vehicle();
    if (!last) return true;
    return last->head_pos - 0.0 >= safe_distance(last->velocity, cfg);
}

double safe_entry_speed(const Lane& lane, const SimConfig& cfg) noexcept {
    const Vehicle* last = lane.last_approach_vehicle();
    if (!last) return std::numeric_limits<double>::infinity();
    const double a = cfg.a_max;
    const double room = last->head_pos + last->velocity * last->velocity / (2.0 * a) - cfg.s_stop;
    if (room <= 0.0) return 0.0;
    // v^2 / (2a) + v * dt <= room
    const double adt = a * cfg.tick_s;
    return -adt + std::sqrt(adt * adt + 2.0 * a * room);
}

std::optional<Placement> assign_lane(const Vehicle& v, std::span<const Lane* const> approach_lanes, Rng& rng,
                                     const SimConfig& cfg) {
    std::vector<const Lane*> feasible;
    for (const Lane* lane : approach_lanes) {
        if (spawn_feasible(*lane, cfg)) feasible.push_back(lane);
    }
    if (feasible.empty()) return std::nullopt;
    const Lane* chosen = feasible[rng.uniform_index(feasible.size())];
    return Placement{chosen->id, std::min(v.init_velocity, safe_entry_speed(*chosen, cfg))};
}

}  // namespace cvsim
