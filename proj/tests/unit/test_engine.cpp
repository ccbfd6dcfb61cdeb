#include <doctest.h>

#include <set>

#include "cvsim/driver_model.hpp"
#include "cvsim/engine.hpp"
#include "cvsim/kinematics.hpp"

using namespace cvsim;
using doctest::Approx;

namespace {

SimConfig quiet() {
    SimConfig cfg;
    cfg.noise_sigma = 0.0;
    return cfg;
}

const LaneId kWC{Approach::W, Movement::C};

Vehicle car(double pos, double v) {
    Vehicle x;
    x.head_pos = pos;
    x.velocity = v;
    x.init_velocity = v;
    return x;
}

class FixedAdvisory : public GuidanceStrategy {
public:
    explicit FixedAdvisory(double a) : a_(a) {}
    std::string name() const override { return "fixed"; }
    std::optional<double> command(const Vehicle&, const Lane&, const std::optional<GapState>&, const SignalView&,
                                  double) const override {
        return a_;
    }

private:
    double a_;
};

}  // namespace

TEST_CASE("empty world steps") {
    World w(quiet(), default_plan());
    const StepEvents ev = w.step();
    CHECK(ev.tick == 1);
    CHECK(w.clock() == Approx(0.1));
    CHECK(ev.spawned.empty());
    CHECK(ev.row.total_departed == 0);
    CHECK(w.status() == WorldStatus::Running);
    CHECK(check_invariants(w).empty());
}

TEST_CASE("a lone car on green follows the free law exactly") {
    const SimConfig cfg = quiet();
    World w(cfg, uniform_plan(90, Color::Green));
    w.insert_vehicle(kWC, car(0.0, 5.0));
    double x = 0.0, v = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double a = free_acceleration(v, cfg);
        const KinematicResult k = kinematics_step(v, a, cfg.tick_s, cfg);
        x += k.displacement;
        v = k.velocity;
        w.step();
        const Lane& lane = w.lane(kWC);
        REQUIRE(lane.q_in.size() == 1);
        CHECK(lane.q_in.front().head_pos == Approx(x).epsilon(1e-12));
        CHECK(lane.q_in.front().velocity == Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("a lone car crosses on green and is recorded") {
    const SimConfig cfg = quiet();
    World w(cfg, uniform_plan(90, Color::Green));
    std::vector<CarRecord> records;
    w.on_car = [&](const CarRecord& r) { records.push_back(r); };
    w.insert_vehicle(kWC, car(0.0, cfg.desired_speed()));
    while (records.empty() && w.tick() < 1000) w.step();
    REQUIRE(records.size() == 1);
    const double theory = theoretical_travel_time(cfg.desired_speed(), cfg);
    CHECK(records[0].delta >= -cfg.tick_s);
    CHECK(records[0].delta <= 500.0 / cfg.desired_speed() - theory + cfg.tick_s);
    for (int i = 0; i < 200; ++i) w.step();
    CHECK(w.lane(kWC).empty());
    CHECK(w.despawned() == 1);
}

TEST_CASE("a car stops at the line on red and leaves on green") {
    const SimConfig cfg = quiet();
    SignalPlan plan = uniform_plan(200, Color::Red);
    plan = set_color_behind(plan, {kWC}, 100.0, Color::Green);
    World w(cfg, plan);
    w.insert_vehicle(kWC, car(200.0, 12.0));
    bool queued = false;
    while (w.clock() < 99.95) {
        w.step();
        const Lane& lane = w.lane(kWC);
        if (!lane.q_block.empty()) queued = true;
        CHECK(lane.exiting.empty());
    }
    CHECK(queued);
    const Lane& lane = w.lane(kWC);
    REQUIRE(lane.q_block.size() == 1);
    CHECK(lane.q_block.front().head_pos <= cfg.stop_line());
    CHECK(lane.q_block.front().head_pos >= cfg.stop_line() - 0.5);
    CHECK(lane.q_block.front().velocity == 0.0);
    for (int i = 0; i < 20; ++i) w.step();
    CHECK(w.lane(kWC).exiting.size() == 1);
    CHECK(w.metrics().total_stops() == 1);
}

TEST_CASE("two-car regime sequence matches offline classification") {
    const SimConfig cfg = quiet();
    World w(cfg, uniform_plan(90, Color::Green));
    w.insert_vehicle(kWC, car(120.0, 5.0));
    w.insert_vehicle(kWC, car(0.0, 15.0));
    std::set<Regime> seen;
    for (int i = 0; i < 300; ++i) {
        const Lane& before = w.lane(kWC);
        if (before.q_in.size() < 2) break;
        const Vehicle lead = before.q_in[0];
        const Vehicle foll = before.q_in[1];
        // Commands are planned front to back: the follower sees the leader's new command.
        const double lead_cmd = natural_acceleration(std::nullopt, lead.velocity, cfg).accel;
        const GapState g{lead.head_pos - foll.head_pos, foll.velocity - lead.velocity, lead_cmd, lead.velocity};
        const DrivingDecision expected = natural_acceleration(g, foll.velocity, cfg);
        w.step();
        const Lane& after = w.lane(kWC);
        if (after.q_in.size() < 2) break;
        CHECK(after.q_in[1].regime == expected.regime);
        seen.insert(expected.regime);
        CHECK(after.q_in[1].accel_cmd == Approx(expected.accel).epsilon(1e-12));
    }
    CHECK(seen.size() >= 2);
}

TEST_CASE("overlap is reported as a collision") {
    World w(quiet(), uniform_plan(90, Color::Green));
    const VehicleId a = w.insert_vehicle(kWC, car(100.0, 0.0));
    const VehicleId b = w.insert_vehicle(kWC, car(97.0, 0.0));
    const auto an = detect_anomalies(w);
    REQUIRE(an);
    CHECK(an->kind == Anomaly::Kind::Collision);
    CHECK(an->lane == kWC);
    CHECK(an->vehicles == std::vector<VehicleId>{a, b});

    const StepEvents ev = w.step();
    REQUIRE(ev.anomaly);
    CHECK(w.status() == WorldStatus::Aborted);
    CHECK(w.step().tick == 0);
}

TEST_CASE("saturated approach with a short green overflows") {
    SimConfig cfg;
    cfg.seed = 3;
    cfg.flows = {3600, 0, 0, 0};
    World w(cfg, two_phase_plan(100, 10));
    while (w.status() == WorldStatus::Running && w.clock() < 3600) w.step();
    REQUIRE(w.status() == WorldStatus::Aborted);
    REQUIRE(w.anomaly());
    CHECK(w.anomaly()->kind == Anomaly::Kind::Overflow);
    CHECK(w.anomaly()->lane.approach == Approach::W);
}

TEST_CASE("conservation and invariants under load") {
    SimConfig cfg;
    cfg.seed = 11;
    cfg.flows = {1500, 900, 1500, 900};
    cfg.equipped_ratio = 0.5;
    World w(cfg, default_plan());
    std::uint64_t completed = 0;
    for (int i = 0; i < 20000; ++i) {
        const StepEvents ev = w.step();
        completed += ev.completed.size();
        const auto bad = check_invariants(w);
        REQUIRE_MESSAGE(bad.empty(), bad.front());
        REQUIRE(w.status() == WorldStatus::Running);
    }
    CHECK(completed == w.metrics().departed());
    std::uint64_t approach = 0, exiting = 0;
    for (const Lane& l : w.lanes()) {
        approach += l.approach_count();
        exiting += l.exiting.size();
    }
    CHECK(w.metrics().spawned() == w.pending().size() + approach + w.metrics().departed());
    CHECK(w.metrics().departed() == exiting + w.despawned());
}

TEST_CASE("guidance commands are clamped") {
    const SimConfig cfg = quiet();
    World w(cfg, uniform_plan(90, Color::Green), std::make_shared<FixedAdvisory>(50.0));
    Vehicle v = car(0.0, 5.0);
    v.equipped = true;
    w.insert_vehicle(kWC, v);
    w.step();
    const Vehicle& after = w.lane(kWC).q_in.front();
    CHECK(after.accel_used == Approx(cfg.a_max));
    CHECK(after.velocity == Approx(5.0 + cfg.a_max * cfg.tick_s));
    for (int i = 0; i < 100; ++i) w.step();
    CHECK(w.lane(kWC).q_in.front().velocity <= cfg.v_limit);

    World w2(cfg, uniform_plan(90, Color::Green), std::make_shared<FixedAdvisory>(-50.0));
    w2.insert_vehicle(kWC, v);
    for (int i = 0; i < 50; ++i) w2.step();
    CHECK(w2.lane(kWC).q_in.front().velocity == 0.0);
    CHECK(w2.lane(kWC).q_in.front().accel_used >= -cfg.a_max);
}

TEST_CASE("unequipped cars ignore guidance") {
    const SimConfig cfg = quiet();
    World w(cfg, uniform_plan(90, Color::Green), std::make_shared<FixedAdvisory>(-50.0));
    w.insert_vehicle(kWC, car(0.0, 5.0));
    w.step();
    CHECK(w.lane(kWC).q_in.front().velocity > 5.0);
}

TEST_CASE("commands between ticks") {
    SimConfig cfg = quiet();
    World w(cfg, default_plan());
    w.set_flow(Approach::N, 1200);
    CHECK(w.config().flow(Approach::N) == 1200);
    w.set_ratio(0.25);
    CHECK(w.config().equipped_ratio == 0.25);
    CHECK_THROWS_AS(w.set_ratio(1.5), ConfigError);
    CHECK_THROWS_AS(w.set_flow(Approach::N, -1), ConfigError);
    SignalPlan bad = default_plan();
    bad.of(kWC)[0].end_s = 50;
    CHECK_THROWS_AS(w.set_plan(bad), ConfigError);
    CHECK(w.plan() == default_plan());
    w.end();
    CHECK(w.status() == WorldStatus::Ended);
    CHECK(w.step().tick == 0);
}
