#include "cvsim/snapshot.hpp"

#include <cmath>

#include "cvsim/protocol.hpp"

namespace cvsim {

namespace {

using nlohmann::json;

double r3(double x) { return std::round(x * 1000.0) / 1000.0; }

WorldStatus parse_status(const std::string& s) {
    if (s == "ended") return WorldStatus::Ended;
    if (s == "aborted") return WorldStatus::Aborted;
    return WorldStatus::Running;
}

Regime parse_regime(const std::string& s) {
    for (Regime r : {Regime::Free, Regime::Approach, Regime::Leave, Regime::Follow, Regime::Brake, Regime::Queued,
                     Regime::Exiting}) {
        if (s == to_string(r)) return r;
    }
    throw ConfigError("unknown regime '" + s + "'");
}

LaneId lane_of(const json& j) {
    const auto id = parse_lane(j.get<std::string>());
    if (!id) throw ConfigError("unknown lane '" + j.get<std::string>() + "'");
    return *id;
}

}  // namespace

Snapshot snapshot_of(const World& world, SpeedMode mode) {
    Snapshot s;
    s.sim_time = world.clock();
    s.mode = mode;
    s.status = world.status();
    s.config = world.config();
    s.plan = world.plan();

    std::uint64_t in_system = 0;
    for (const Lane& lane : world.lanes()) {
        for (const auto* seq : {&lane.exiting, &lane.q_block, &lane.q_in}) {
            for (const Vehicle& v : *seq) {
                s.vehicles.push_back({v.id, v.lane, v.head_pos, v.velocity, v.equipped, v.regime});
            }
        }
        in_system += lane.approach_count();
        s.signals.push_back({lane.id, color_at(world.plan(), lane.id, s.sim_time), time_in_cycle(world.plan(), s.sim_time)});
    }

    const MetricsAccumulator& m = world.metrics();
    SnapshotStats& st = s.stats;
    st.vehicles_in_system = in_system;
    st.total_spawned = m.spawned();
    st.total_departed = m.departed();
    st.pending_count = world.pending().size();
    st.avg_delay_s = m.departed() ? m.sum_delta() / static_cast<double>(m.departed()) : 0.0;
    st.total_stops = m.total_stops();
    const double entered = static_cast<double>(m.entered());
    st.avg_stops_per_vehicle = m.entered() ? static_cast<double>(m.total_stops()) / entered : 0.0;
    st.total_stop_time_s = m.total_stop_time();
    st.avg_stop_time_s = m.entered() ? m.total_stop_time() / entered : 0.0;
    st.throughput_veh_per_h = s.sim_time > 0.0 ? static_cast<double>(m.departed()) * 3600.0 / s.sim_time : 0.0;
    st.equipped_fraction_actual =
        m.spawned() ? static_cast<double>(m.equipped_spawned()) / static_cast<double>(m.spawned()) : 0.0;
    st.sim_time_s = s.sim_time;
    return s;
}

json to_json(const Snapshot& s) {
    json vehicles = json::array();
    for (const auto& v : s.vehicles) {
        vehicles.push_back({{"id", v.id},
                            {"lane", to_string(v.lane)},
                            {"head_pos", r3(v.head_pos)},
                            {"velocity", r3(v.velocity)},
                            {"equipped", v.equipped},
                            {"regime", to_string(v.regime)}});
    }
    json signals = json::array();
    for (const auto& g : s.signals) {
        signals.push_back({{"lane", to_string(g.lane)}, {"color", to_string(g.color)}, {"time_in_cycle", r3(g.time_in_cycle)}});
    }
    const SnapshotStats& st = s.stats;
    json stats{{"vehicles_in_system", st.vehicles_in_system},
               {"total_spawned", st.total_spawned},
               {"total_departed", st.total_departed},
               {"pending_count", st.pending_count},
               {"avg_delay_s", r3(st.avg_delay_s)},
               {"total_stops", st.total_stops},
               {"avg_stops_per_vehicle", r3(st.avg_stops_per_vehicle)},
               {"total_stop_time_s", r3(st.total_stop_time_s)},
               {"avg_stop_time_s", r3(st.avg_stop_time_s)},
               {"throughput_veh_per_h", r3(st.throughput_veh_per_h)},
               {"equipped_fraction_actual", r3(st.equipped_fraction_actual)},
               {"sim_time_s", r3(st.sim_time_s)}};
    return {{"v", kProtocolVersion},
            {"type", "snapshot"},
            {"sim_time", r3(s.sim_time)},
            {"mode", to_string(s.mode)},
            {"status", to_string(s.status)},
            {"vehicles", std::move(vehicles)},
            {"signals", std::move(signals)},
            {"stats", std::move(stats)},
            {"config", to_json(s.config)},
            {"plan", to_json(s.plan)}};
}

Snapshot snapshot_from_json(const json& j) {
    try {
        if (j.at("type").get<std::string>() != "snapshot") throw ConfigError("not a snapshot frame");
        Snapshot s;
        s.sim_time = j.at("sim_time").get<double>();
        const auto mode = parse_speed_mode(j.at("mode").get<std::string>());
        if (!mode) throw ConfigError("unknown mode");
        s.mode = *mode;
        s.status = parse_status(j.at("status").get<std::string>());
        for (const auto& v : j.at("vehicles")) {
            s.vehicles.push_back({v.at("id").get<VehicleId>(), lane_of(v.at("lane")), v.at("head_pos").get<double>(),
                                  v.at("velocity").get<double>(), v.at("equipped").get<bool>(),
                                  parse_regime(v.at("regime").get<std::string>())});
        }
        for (const auto& g : j.at("signals")) {
            const auto c = parse_color(g.at("color").get<std::string>());
            if (!c) throw ConfigError("unknown color");
            s.signals.push_back({lane_of(g.at("lane")), *c, g.at("time_in_cycle").get<double>()});
        }
        const json& st = j.at("stats");
        SnapshotStats& o = s.stats;
        o.vehicles_in_system = st.at("vehicles_in_system").get<std::uint64_t>();
        o.total_spawned = st.at("total_spawned").get<std::uint64_t>();
        o.total_departed = st.at("total_departed").get<std::uint64_t>();
        o.pending_count = st.at("pending_count").get<std::uint64_t>();
        o.avg_delay_s = st.at("avg_delay_s").get<double>();
        o.total_stops = st.at("total_stops").get<std::uint64_t>();
        o.avg_stops_per_vehicle = st.at("avg_stops_per_vehicle").get<double>();
        o.total_stop_time_s = st.at("total_stop_time_s").get<double>();
        o.avg_stop_time_s = st.at("avg_stop_time_s").get<double>();
        o.throughput_veh_per_h = st.at("throughput_veh_per_h").get<double>();
        o.equipped_fraction_actual = st.at("equipped_fraction_actual").get<double>();
        o.sim_time_s = st.at("sim_time_s").get<double>();
        s.config = config_from_json(j.at("config"));
        s.plan = plan_from_json(j.at("plan"));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace cvsim
