#include <doctest.h>

#include <cmath>
#include <set>

#include "cvsim/config.hpp"
#include "cvsim/kinematics.hpp"
#include "cvsim/rng.hpp"
#include "cvsim/types.hpp"

using namespace cvsim;
using doctest::Approx;

TEST_CASE("lane ids") {
    std::set<std::string> names;
    for (std::size_t i = 0; i < kLaneCount; ++i) {
        const LaneId id = LaneId::from_index(i);
        CHECK(id.index() == i);
        names.insert(to_string(id));
        CHECK(parse_lane(to_string(id)) == id);
    }
    CHECK(names.size() == 12);
    CHECK(to_string(all_lanes()[0]) == "WL");
    CHECK(to_string(all_lanes()[11]) == "NR");
    CHECK_FALSE(parse_lane("XL"));
    CHECK_FALSE(parse_lane("W"));
}

TEST_CASE("kinematics_step examples") {
    SimConfig cfg;
    auto r = kinematics_step(10, 1, 0.1, cfg);
    CHECK(r.velocity == Approx(10.1).epsilon(1e-12));
    CHECK(r.displacement == Approx(1.005).epsilon(1e-12));

    r = kinematics_step(0, 0, 0.1, cfg);
    CHECK(r.velocity == 0.0);
    CHECK(r.displacement == 0.0);

    r = kinematics_step(10, 5, 0.1, cfg);
    CHECK(r.velocity == Approx(10.25).epsilon(1e-12));
    CHECK(r.displacement == Approx(1.0125).epsilon(1e-12));
    CHECK(r.accel_used == Approx(2.5).epsilon(1e-12));
}

TEST_CASE("kinematics_step clamps speed and re-derives acceleration") {
    SimConfig cfg;
    auto r = kinematics_step(16.6, 2.5, 0.1, cfg);
    CHECK(r.velocity == cfg.v_limit);
    CHECK(r.accel_used == Approx((cfg.v_limit - 16.6) / 0.1));

    r = kinematics_step(0.1, -2.5, 0.1, cfg);
    CHECK(r.velocity == 0.0);
    CHECK(r.displacement >= 0.0);
    CHECK(r.displacement == Approx(0.005));

    cfg.v_min = 2.0;
    r = kinematics_step(2.1, -2.5, 0.1, cfg);
    CHECK(r.velocity == 2.0);
    r = kinematics_step(2.1, -2.5, 0.1, cfg, true);
    CHECK(r.velocity == Approx(1.85));
}

TEST_CASE("kinematics_step invariants over random inputs") {
    SimConfig cfg;
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double v = rng.uniform(0, cfg.v_limit);
        const double a = rng.uniform(-10, 10);
        const auto r = kinematics_step(v, a, cfg.tick_s, cfg, rng.bernoulli(0.5));
        CHECK(r.velocity >= 0.0);
        CHECK(r.velocity <= cfg.v_limit);
        CHECK(r.displacement >= 0.0);
        CHECK(std::abs(r.accel_used) <= cfg.a_max + 1e-9);
        CHECK(r.displacement == Approx(0.5 * (v + r.velocity) * cfg.tick_s));
    }
}

TEST_CASE("apply_noise") {
    SimConfig cfg;
    cfg.noise_sigma = 0.0;
    Rng rng(1);
    CHECK(apply_noise(1.0, rng, cfg) == 1.0);
    // sigma = 0 consumes nothing
    Rng fresh(1);
    CHECK(rng.next_u64() == fresh.next_u64());

    cfg.noise_sigma = 0.2;
    Rng a(42), b(42);
    CHECK(apply_noise(0.0, a, cfg) == 0.2 * b.standard_normal());

    Rng c(7);
    const int n = 100000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double e = apply_noise(0.0, c, cfg);
        sum += e;
        sq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.005);
    CHECK(std::abs(sd - 0.2) < 0.01);
}

TEST_CASE("rng reference vector") {
    // mt19937_64 with the default seed produces 9981545732273789042 as its 10000th output.
    std::mt19937_64 ref;
    ref.discard(9999);
    CHECK(ref() == 9981545732273789042ULL);
    Rng r(5489);
    Rng s(5489);
    CHECK(r.uniform01() == static_cast<double>(s.next_u64() >> 11) * 0x1.0p-53);
    Rng e(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng idx(4);
    for (int i = 0; i < 1000; ++i) CHECK(idx.uniform_index(3) < 3);
}

TEST_CASE("brake_to examples") {
    SimConfig cfg;
    CHECK(brake_to(10, 0, 25, cfg).accel == Approx(-2.0));
    CHECK(brake_to(0, 0, 25, cfg).accel == 0.0);
    const auto b = brake_to(10, 0, 10, cfg);
    CHECK(b.accel == Approx(-5.0));
    CHECK_FALSE(b.emergency);
    CHECK(kinematics_step(10, b.accel, 0.1, cfg).accel_used == Approx(-2.5));
    const auto e = brake_to(5, 10, 10, cfg);
    CHECK(e.emergency);
    CHECK(e.accel == -cfg.a_max);
}

TEST_CASE("brake_to closed loop stops near the target") {
    SimConfig cfg;
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const double v0 = rng.uniform(0.5, cfg.v_limit);
        const double min_gap = v0 * v0 / (2 * cfg.a_max);
        const double gap = min_gap + rng.uniform(0, 200);
        double v = v0, x = 0;
        for (int k = 0; k < 100000 && v > 0; ++k) {
            const double a = brake_to(v, x, gap, cfg).accel;
            const auto r = kinematics_step(v, a, cfg.tick_s, cfg, true);
            v = r.velocity;
            x += r.displacement;
        }
        CHECK(v == 0.0);
        CHECK(std::abs(x - gap) <= 0.5);
    }
}

TEST_CASE("config validation and json") {
    SimConfig cfg;
    CHECK(validate(cfg).empty());
    SimConfig bad;
    bad.s_stop = 4.0;
    bad.equipped_ratio = 2;
    bad.flows[1] = -1;
    const auto v = validate(bad);
    CHECK(v.size() == 3);
    CHECK_THROWS_AS(require_valid(bad), ConfigError);

    cfg.flows = {100, 200, 300, 400};
    cfg.seed = 77;
    const SimConfig back = config_from_json(to_json(cfg));
    CHECK(back.flows == cfg.flows);
    CHECK(back.seed == 77);
    CHECK(back.a_max == cfg.a_max);

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"nope", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"a_max", "x"}}), ConfigError);
    const SimConfig arr = config_from_json(nlohmann::json{{"flows", {1, 2, 3, 4}}});
    CHECK(arr.flow(Approach::N) == 4);
}
