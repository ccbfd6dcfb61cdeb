#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "cvsim/metrics.hpp"

using namespace cvsim;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const char* name) {
    const fs::path p = fs::temp_directory_path() / "cvsim-unit" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::array<Lane, kLaneCount> empty_lanes() {
    std::array<Lane, kLaneCount> lanes;
    for (std::size_t i = 0; i < kLaneCount; ++i) lanes[i].id = LaneId::from_index(i);
    return lanes;
}

}  // namespace

TEST_CASE("theoretical_travel_time examples") {
    SimConfig cfg;
    CHECK(theoretical_travel_time(cfg.v_limit, cfg) == Approx(30.0).epsilon(1e-4));
    CHECK(theoretical_travel_time(0, cfg) == Approx(6.6668 + (500 - 0.5 * 2.5 * 6.6668 * 6.6668) / 16.667).epsilon(1e-4));
    CHECK(theoretical_travel_time(0, cfg) == Approx(33.33).epsilon(1e-3));
    cfg.approach_length = 0;
    CHECK(theoretical_travel_time(5, cfg) == 0.0);
}

TEST_CASE("theoretical_travel_time pure acceleration branch") {
    SimConfig cfg;
    cfg.approach_length = 20;
    cfg.s_reaction = 10;
    cfg.s_headway_min = 5;
    // 0 + 0.5*2.5*t^2 = 20 -> t = 4
    CHECK(theoretical_travel_time(0, cfg) == Approx(4.0));
}

TEST_CASE("stop episodes and stop time") {
    SimConfig cfg;
    auto lanes = empty_lanes();
    MetricsAccumulator m;
    Vehicle v;
    v.lane = LaneId::from_index(4);
    v.velocity = 0.0;
    m.on_spawn(v);
    m.on_enter(v);
    lanes[4].q_block.push_back(v);
    TickRow row;
    for (std::uint64_t t = 1; t <= 300; ++t) row = m.record_tick(lanes, t, cfg);
    CHECK(row.stops[4] == 1);
    CHECK(row.stop_time[4] == Approx(30.0));
    CHECK(row.total_stop_time == Approx(30.0));
    CHECK(row.avg_stop_time_per_vehicle == Approx(30.0));
    CHECK(row.avg_stops_per_vehicle == 1.0);
}

TEST_CASE("never below the threshold means no stops") {
    SimConfig cfg;
    auto lanes = empty_lanes();
    MetricsAccumulator m;
    Vehicle v;
    v.velocity = 10;
    lanes[0].q_in.push_back(v);
    for (std::uint64_t t = 1; t <= 100; ++t) m.record_tick(lanes, t, cfg);
    CHECK(m.total_stops() == 0);
    CHECK(m.total_stop_time() == 0.0);
}

TEST_CASE("two threshold crossings are two episodes") {
    SimConfig cfg;
    auto lanes = empty_lanes();
    MetricsAccumulator m;
    lanes[0].q_in.push_back(Vehicle{});
    std::uint64_t t = 0;
    for (double speed : {2.0, 0.5, 2.0, 0.5}) {
        lanes[0].q_in.front().velocity = speed;
        m.record_tick(lanes, ++t, cfg);
    }
    CHECK(m.total_stops() == 2);
    CHECK(m.lane_stops()[0] == 2);
    CHECK(m.total_stop_time() == Approx(0.2));
}

TEST_CASE("departure record") {
    SimConfig cfg;
    MetricsAccumulator m(100);
    Vehicle v;
    v.id = 7;
    v.lane = LaneId::from_index(2);
    v.init_velocity = cfg.v_limit;
    v.spawn_time = 10;
    v.crossed_time = 45;
    const CarRecord r = m.on_departed(v, cfg);
    CHECK(r.car_id == 7);
    CHECK(r.actual_time == 35);
    CHECK(r.delta == Approx(35 - theoretical_travel_time(cfg.v_limit, cfg)));
    CHECK(m.lane_departures()[2] == 1);
    CHECK(m.warmup_window().completed == 0);
    v.crossed_time = 150;
    m.on_departed(v, cfg);
    CHECK(m.warmup_window().completed == 1);
}

TEST_CASE("run directory naming") {
    const auto when = std::chrono::system_clock::now();
    const std::string name = run_directory_name(when, "headless");
    CHECK(std::regex_match(name, std::regex(R"(\d{8}-\d{6}-headless)")));

    const fs::path base = scratch("dirs");
    const fs::path a = create_run_directory(base, "fast", when);
    const fs::path b = create_run_directory(base, "fast", when);
    const fs::path c = create_run_directory(base, "fast", when);
    CHECK(a.filename().string() == run_directory_name(when, "fast"));
    CHECK(b.filename().string() == run_directory_name(when, "fast") + "_2");
    CHECK(c.filename().string() == run_directory_name(when, "fast") + "_3");
}

TEST_CASE("unwritable output directory is an I/O error") {
    const fs::path base = scratch("blocked");
    std::ofstream(base / "file") << "x";
    CHECK_THROWS_AS(create_run_directory(base / "file", "headless", std::chrono::system_clock::now()), IoError);
}

TEST_CASE("csv outputs") {
    const fs::path dir = scratch("csv");
    {
        CsvOutputs out(dir);
        out.close();
    }
    CHECK(slurp(dir / "car.csv") == "car_id,init_velocity,thoritical_time,act_time,delta\n");
    CHECK(slurp(dir / "stop.csv") ==
          "tick,WL,WC,WR,SL,SC,SR,EL,EC,ER,NL,NC,NR,total_stops,avg_stops_per_vehicle\n");
    CHECK(slurp(dir / "road.csv") == "tick,WL,WC,WR,SL,SC,SR,EL,EC,ER,NL,NC,NR,total_departed,avg\n");
    CHECK(slurp(dir / "stop_time.csv") ==
          "tick,WL,WC,WR,SL,SC,SR,EL,EC,ER,NL,NC,NR,total_stop_time,avg_stop_time_per_vehicle\n");

    const fs::path dir2 = scratch("csv2");
    CsvOutputs out(dir2);
    out.write_car({3, 12.3456, 31.0, 35.5, 4.5});
    TickRow row;
    row.tick = 1;
    row.stops[0] = 2;
    row.departures[11] = 5;
    row.stop_time[1] = 0.1;
    row.total_stops = 2;
    row.total_departed = 5;
    row.total_stop_time = 0.1;
    row.avg_stops_per_vehicle = 2.0 / 3.0;
    row.avg_departed_per_lane = 5.0 / 12.0;
    row.avg_stop_time_per_vehicle = 0.1 / 3.0;
    out.write_tick(row);
    out.close();
    CHECK(slurp(dir2 / "car.csv").substr(52) == "3,12.346,31.000,35.500,4.500\n");
    const std::string stop = slurp(dir2 / "stop.csv");
    CHECK(stop.substr(stop.find('\n') + 1) == "1,2,0,0,0,0,0,0,0,0,0,0,0,2,0.667\n");
    const std::string road = slurp(dir2 / "road.csv");
    CHECK(road.substr(road.find('\n') + 1) == "1,0,0,0,0,0,0,0,0,0,0,0,5,5,0.417\n");
    const std::string st = slurp(dir2 / "stop_time.csv");
    CHECK(st.substr(st.find('\n') + 1) ==
          "1,0.000,0.100,0.000,0.000,0.000,0.000,0.000,0.000,0.000,0.000,0.000,0.000,0.100,0.033\n");
}
