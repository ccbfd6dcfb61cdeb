#include "cvsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cvsim/driver_model.hpp"
#include "cvsim/kinematics.hpp"
#include "cvsim/queue_control.hpp"

namespace cvsim {

std::string_view to_string(WorldStatus s) noexcept {
    switch (s) {
        case WorldStatus::Running: return "running";
        case WorldStatus::Ended: return "ended";
        case WorldStatus::Aborted: return "aborted";
    }
    return "?";
}

std::string_view to_string(Anomaly::Kind k) noexcept {
    return k == Anomaly::Kind::Collision ? "collision" : "overflow";
}

namespace {

GapState gap_to(const Vehicle& follower, const Vehicle& leader) {
    return {leader.head_pos - follower.head_pos, follower.velocity - leader.velocity, leader.accel_cmd,
            leader.velocity};
}

}  // namespace

World::World(SimConfig cfg, SignalPlan plan, std::shared_ptr<const GuidanceStrategy> strategy, double warmup_s)
    : cfg_(std::move(cfg)),
      plan_(std::move(plan)),
      strategy_(strategy ? std::move(strategy) : std::make_shared<PassThroughStrategy>()),
      rng_(cfg_.seed),
      metrics_(warmup_s) {
    require_valid(cfg_);
    require_valid(plan_);
    for (std::size_t i = 0; i < kLaneCount; ++i) lanes_[i].id = LaneId::from_index(i);
    for (Approach a : kApproaches) arrivals_[static_cast<std::size_t>(a)] = ArrivalProcess({a, cfg_.flow(a)});
}

void World::set_flow(Approach a, double veh_per_hour) {
    if (!(veh_per_hour >= 0.0)) throw ConfigError("flow must be >= 0");
    cfg_.flows[static_cast<std::size_t>(a)] = veh_per_hour;
    arrivals_[static_cast<std::size_t>(a)].set_flow(veh_per_hour);
}

void World::set_ratio(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("equipped_ratio must be in [0, 1]");
    cfg_.equipped_ratio = ratio;
}

void World::set_plan(SignalPlan plan) {
    require_valid(plan);
    plan_ = std::move(plan);
}

void World::end() {
    if (status_ == WorldStatus::Running) status_ = WorldStatus::Ended;
}

VehicleId World::insert_vehicle(LaneId id, Vehicle v, bool queued) {
    if (v.id == 0) v.id = next_id_;
    next_id_ = std::max(next_id_, v.id + 1);
    v.lane = id;
    v.regime = queued ? Regime::Queued : Regime::Free;
    metrics_.on_spawn(v);
    metrics_.on_enter(v);
    Lane& lane = lanes_[id.index()];
    (queued ? lane.q_block : lane.q_in).push_back(v);
    return v.id;
}

void World::spawn_and_place(StepEvents& ev, double t) {
    const double dt = cfg_.tick_s;
    for (Approach a : kApproaches) {
        for (double ts : arrivals_[static_cast<std::size_t>(a)].sample(t, dt, rng_)) {
            Vehicle v = make_vehicle(a, next_id_++, ts, t, rng_, cfg_);
            metrics_.on_spawn(v);
            ev.spawned.push_back(v.id);
            pending_.of(a).push_back(std::move(v));
        }
    }
    for (Approach a : kApproaches) {
        auto& queue = pending_.of(a);
        const std::size_t base = static_cast<std::size_t>(a) * kMovementCount;
        const std::array<const Lane*, kMovementCount> candidates{&lanes_[base], &lanes_[base + 1], &lanes_[base + 2]};
        while (!queue.empty()) {
            const auto placement = assign_lane(queue.front(), candidates, rng_, cfg_);
            if (!placement) break;
            Vehicle v = std::move(queue.front());
            queue.pop_front();
            v.lane = placement->lane;
            v.head_pos = 0.0;
            v.velocity = v.init_velocity = placement->entry_speed;
            v.regime = Regime::Free;
            metrics_.on_enter(v);
            ev.placed.push_back(v.id);
            lanes_[placement->lane.index()].q_in.push_back(std::move(v));
        }
    }
}

void World::plan_accelerations(std::array<Color, kLaneCount>& colors, std::vector<char>& stopping, double t) {
    stopping.clear();
    for (Lane& lane : lanes_) {
        const Color color = color_at(plan_, lane.id, t);
        colors[lane.id.index()] = color;

        // Exiting cars first: the q_in head may follow the rearmost of them. Past the line
        // they clear the box at the free law, held back only by the collision guard.
        for (std::size_t i = 0; i < lane.exiting.size(); ++i) {
            Vehicle& v = lane.exiting[i];
            v.accel_cmd = free_acceleration(v.velocity, cfg_);
            if (i > 0) v.accel_cmd = std::min(v.accel_cmd, safe_speed_cap(gap_to(v, lane.exiting[i - 1]), v.velocity, cfg_));
            v.regime = Regime::Exiting;
        }

        const SignalView view{color, time_in_cycle(plan_, t), plan_.cycle_s, cfg_.stop_line()};
        for (std::size_t i = 0; i < lane.q_in.size(); ++i) {
            Vehicle& v = lane.q_in[i];
            std::optional<GapState> gap;
            bool stop = false;
            if (i == 0) {
                const HeadCommand h = control_qin_head(lane, color, cfg_);
                v.accel_cmd = h.accel;
                v.regime = h.regime;
                stop = h.stopping_for_signal;
                gap = head_leader_gap(lane);
            } else {
                gap = gap_to(v, lane.q_in[i - 1]);
                const DrivingDecision d = natural_acceleration(gap, v.velocity, cfg_);
                v.accel_cmd = d.accel;
                v.regime = d.regime;
            }
            if (v.equipped) {
                if (auto a = strategy_->command(v, lane, gap, view, t)) {
                    v.accel_cmd = *a;
                    stop = false;
                }
            }
            stopping.push_back(stop ? 1 : 0);
        }
    }
}

void World::integrate(const std::vector<char>& stopping) {
    const double dt = cfg_.tick_s;
    std::size_t k = 0;
    for (Lane& lane : lanes_) {
        for (Vehicle& v : lane.q_in) {
            const double a = apply_noise(v.accel_cmd, rng_, cfg_);
            const KinematicResult r = kinematics_step(v.velocity, a, dt, cfg_, stopping[k++] != 0);
            v.head_pos += r.displacement;
            v.velocity = r.velocity;
            v.accel_used = r.accel_used;
        }
        for (Vehicle& v : lane.exiting) {
            const double a = apply_noise(v.accel_cmd, rng_, cfg_);
            const KinematicResult r = kinematics_step(v.velocity, a, dt, cfg_);
            v.head_pos += r.displacement;
            v.velocity = r.velocity;
            v.accel_used = r.accel_used;
        }
    }
}

void World::update_overflow_timers() {
    for (const Lane& lane : lanes_) {
        double& timer = overflow_s_[lane.id.index()];
        const Vehicle* last = lane.last_approach_vehicle();
        if (last && last->head_pos < cfg_.s_headway_min) {
            timer += cfg_.tick_s;
        } else {
            timer = 0.0;
        }
    }
}

StepEvents World::step() {
    StepEvents ev;
    if (status_ != WorldStatus::Running) return ev;
    const double t = clock();
    const double t_end = static_cast<double>(tick_ + 1) * cfg_.tick_s;
    ev.tick = tick_ + 1;

    spawn_and_place(ev, t);

    std::array<Color, kLaneCount> colors{};
    std::vector<char> stopping;
    plan_accelerations(colors, stopping, t);
    integrate(stopping);

    const double despawn_at = cfg_.stop_line() + cfg_.exit_length;
    for (Lane& lane : lanes_) {
        QueueEvents q = update_qblock(lane, colors[lane.id.index()], t_end, cfg_);
        ev.joined.insert(ev.joined.end(), q.joined.begin(), q.joined.end());
        for (const Vehicle& v : q.departed) {
            CarRecord r = metrics_.on_departed(v, cfg_);
            if (on_car) on_car(r);
            ev.completed.push_back(r);
        }
        while (!lane.exiting.empty() && lane.exiting.front().head_pos >= despawn_at) {
            ev.despawned.push_back(lane.exiting.front().id);
            lane.exiting.pop_front();
            ++despawned_;
        }
    }

    ev.row = metrics_.record_tick(lanes_, ev.tick, cfg_);
    if (on_tick_row) on_tick_row(ev.row);

    update_overflow_timers();
    if (auto a = detect_anomalies(*this)) {
        a->tick = ev.tick;
        anomaly_ = a;
        ev.anomaly = a;
        status_ = WorldStatus::Aborted;
    }
    ++tick_;
    return ev;
}

std::optional<Anomaly> detect_anomalies(const World& world) {
    const SimConfig& cfg = world.config();
    char buf[192];
    for (const Lane& lane : world.lanes()) {
        const Vehicle* ahead = nullptr;
        auto check = [&](const Vehicle& v) -> std::optional<Anomaly> {
            if (ahead && ahead->head_pos - v.head_pos < cfg.vehicle_length) {
                Anomaly a;
                a.kind = Anomaly::Kind::Collision;
                a.lane = lane.id;
                a.vehicles = {ahead->id, v.id};
                a.tick = world.tick();
                std::snprintf(buf, sizeof buf, "collision on %s: vehicles %llu and %llu spaced %.3f m",
                              to_string(lane.id).c_str(), static_cast<unsigned long long>(ahead->id),
                              static_cast<unsigned long long>(v.id), ahead->head_pos - v.head_pos);
                a.message = buf;
                return a;
            }
            ahead = &v;
            return std::nullopt;
        };
        for (const auto* seq : {&lane.exiting, &lane.q_block, &lane.q_in}) {
            for (const Vehicle& v : *seq) {
                if (auto a = check(v)) return a;
            }
        }
        const double held = world.overflow_timers()[lane.id.index()];
        if (held > kOverflowHold_s + 1e-9) {
            Anomaly a;
            a.kind = Anomaly::Kind::Overflow;
            a.lane = lane.id;
            if (const Vehicle* last = lane.last_approach_vehicle()) a.vehicles = {last->id};
            a.tick = world.tick();
            std::snprintf(buf, sizeof buf, "overflow on %s: queue at the spawn point for %.1f s",
                          to_string(lane.id).c_str(), held);
            a.message = buf;
            return a;
        }
    }
    return std::nullopt;
}

std::vector<std::string> check_invariants(const World& world) {
    std::vector<std::string> out;
    const SimConfig& cfg = world.config();
    std::size_t in_lanes = 0;
    std::size_t exiting = 0;
    for (const Lane& lane : world.lanes()) {
        const std::string name = to_string(lane.id);
        auto ordered = [&](const std::deque<Vehicle>& q, const char* what) {
            for (std::size_t i = 1; i < q.size(); ++i) {
                if (!(q[i].head_pos < q[i - 1].head_pos)) out.push_back(name + ": " + what + " out of order");
            }
        };
        ordered(lane.q_in, "q_in");
        ordered(lane.q_block, "q_block");
        ordered(lane.exiting, "exiting");
        for (const Vehicle& v : lane.q_block) {
            if (v.head_pos > cfg.stop_line()) out.push_back(name + ": q_block vehicle past the stop line");
        }
        if (!lane.q_block.empty() && !lane.q_in.empty() && lane.q_in.front().head_pos >= lane.q_block.back().head_pos) {
            out.push_back(name + ": q_in head not behind q_block tail");
        }
        for (const auto* seq : {&lane.exiting, &lane.q_block, &lane.q_in}) {
            for (const Vehicle& v : *seq) {
                if (v.velocity < 0.0 || v.velocity > cfg.v_limit) out.push_back(name + ": speed out of bounds");
                if (std::abs(v.accel_used) > cfg.a_max + 1e-9 && v.regime != Regime::Queued) {
                    out.push_back(name + ": realized acceleration above a_max");
                }
            }
        }
        in_lanes += lane.approach_count();
        exiting += lane.exiting.size();
    }
    const MetricsAccumulator& m = world.metrics();
    if (m.spawned() != world.pending().size() + in_lanes + m.departed()) {
        out.push_back("conservation: spawned != pending + approaching + departed");
    }
    if (m.departed() != exiting + world.despawned()) {
        out.push_back("conservation: departed != exiting + despawned");
    }
    return out;
}

}  // namespace cvsim
