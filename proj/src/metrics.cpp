#include "cvsim/metrics.hpp"

#include <cmath>
#include <ctime>
#include <system_error>

namespace cvsim {

double theoretical_travel_time(double v0, const SimConfig& cfg) noexcept {
    const double length = cfg.approach_length;
    if (length <= 0.0) return 0.0;
    const double a = cfg.a_max;
    const double t_acc = (cfg.v_limit - v0) / a;
    const double d_acc = v0 * t_acc + 0.5 * a * t_acc * t_acc;
    if (d_acc >= length) return (-v0 + std::sqrt(v0 * v0 + 2.0 * a * length)) / a;
    return t_acc + (length - d_acc) / cfg.v_limit;
}

void MetricsAccumulator::on_spawn(const Vehicle& v) {
    ++spawned_;
    if (v.equipped) ++equipped_spawned_;
}

void MetricsAccumulator::on_enter(const Vehicle&) { ++entered_; }

CarRecord MetricsAccumulator::on_departed(const Vehicle& v, const SimConfig& cfg) {
    CarRecord r;
    r.car_id = v.id;
    r.init_velocity = v.init_velocity;
    r.theoretical_time = theoretical_travel_time(v.init_velocity, cfg);
    r.actual_time = v.crossed_time.value_or(v.spawn_time) - v.spawn_time;
    r.delta = r.actual_time - r.theoretical_time;
    ++departures_[v.lane.index()];
    ++total_departed_;
    sum_delta_ += r.delta;
    if (v.crossed_time.value_or(0.0) >= warmup_s_) {
        ++late_completed_;
        late_sum_delta_ += r.delta;
    }
    return r;
}

TickRow MetricsAccumulator::record_tick(std::span<Lane> lanes, std::uint64_t tick, const SimConfig& cfg) {
    tick_s_ = cfg.tick_s;
    const double tick_start = static_cast<double>(tick - 1) * cfg.tick_s;
    const bool late = tick_start >= warmup_s_;
    auto visit = [&](Vehicle& v) {
        const std::size_t li = v.lane.index();
        if (v.velocity < cfg.stop_speed_threshold) {
            if (!v.in_stop) {
                v.in_stop = true;
                ++stops_[li];
                ++total_stops_;
                if (late) ++late_stops_;
            }
            ++stop_ticks_[li];
            ++total_stop_ticks_;
            if (late) ++late_stop_ticks_;
        } else {
            v.in_stop = false;
        }
    };
    for (auto& lane : lanes) {
        for (auto& v : lane.q_block) visit(v);
        for (auto& v : lane.q_in) visit(v);
    }

    TickRow row;
    row.tick = tick;
    row.stops = stops_;
    row.departures = departures_;
    for (std::size_t i = 0; i < kLaneCount; ++i) row.stop_time[i] = static_cast<double>(stop_ticks_[i]) * cfg.tick_s;
    row.total_stops = total_stops_;
    row.total_departed = total_departed_;
    row.total_stop_time = total_stop_time();
    const double entered = static_cast<double>(entered_);
    row.avg_stops_per_vehicle = entered_ ? static_cast<double>(total_stops_) / entered : 0.0;
    row.avg_stop_time_per_vehicle = entered_ ? row.total_stop_time / entered : 0.0;
    row.avg_departed_per_lane = static_cast<double>(total_departed_) / static_cast<double>(kLaneCount);
    return row;
}

WindowSummary MetricsAccumulator::warmup_window() const {
    WindowSummary s;
    s.from_s = warmup_s_;
    s.completed = late_completed_;
    s.mean_delta = late_completed_ ? late_sum_delta_ / static_cast<double>(late_completed_) : 0.0;
    s.stops = late_stops_;
    s.stop_time = static_cast<double>(late_stop_ticks_) * tick_s_;
    return s;
}

std::string run_directory_name(std::chrono::system_clock::time_point when, const std::string& mode) {
    const std::time_t t = std::chrono::system_clock::to_time_t(when);
    std::tm local{};
    localtime_r(&t, &local);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &local);
    return std::string(buf) + "-" + mode;
}

std::filesystem::path create_run_directory(const std::filesystem::path& base, const std::string& mode,
                                           std::chrono::system_clock::time_point when) {
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) throw IoError("cannot create output directory '" + base.string() + "': " + ec.message());
    const std::string name = run_directory_name(when, mode);
    for (int n = 1;; ++n) {
        auto dir = base / (n == 1 ? name : name + "_" + std::to_string(n));
        if (std::filesystem::create_directory(dir, ec)) return dir;
        if (ec) throw IoError("cannot create run directory '" + dir.string() + "': " + ec.message());
    }
}

namespace {

std::string lane_header() {
    std::string out;
    for (auto id : all_lanes()) out += "," + to_string(id);
    return out;
}

void put(std::FILE* f, const char* text) {
    if (std::fputs(text, f) < 0) throw IoError("write failed");
}

}  // namespace

CsvOutputs::CsvOutputs(const std::filesystem::path& dir) : dir_(dir) {
    auto open = [&](const char* name, const std::string& header) {
        File f(std::fopen((dir_ / name).string().c_str(), "wb"));
        if (!f) throw IoError("cannot open '" + (dir_ / name).string() + "' for writing");
        put(f.get(), (header + "\n").c_str());
        return f;
    };
    const std::string lanes = lane_header();
    car_ = open("car.csv", "car_id,init_velocity,thoritical_time,act_time,delta");
    stop_ = open("stop.csv", "tick" + lanes + ",total_stops,avg_stops_per_vehicle");
    road_ = open("road.csv", "tick" + lanes + ",total_departed,avg");
    stop_time_ = open("stop_time.csv", "tick" + lanes + ",total_stop_time,avg_stop_time_per_vehicle");
}

CsvOutputs::~CsvOutputs() = default;

void CsvOutputs::write_car(const CarRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu,%.3f,%.3f,%.3f,%.3f\n", static_cast<unsigned long long>(r.car_id),
                  r.init_velocity, r.theoretical_time, r.actual_time, r.delta);
    put(car_.get(), buf);
}

void CsvOutputs::write_tick(const TickRow& row) {
    char buf[64];
    std::string stop, road, stime;
    stop.reserve(128);
    road.reserve(128);
    stime.reserve(192);
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(row.tick));
    stop = road = stime = buf;
    for (std::size_t i = 0; i < kLaneCount; ++i) {
        std::snprintf(buf, sizeof buf, ",%llu", static_cast<unsigned long long>(row.stops[i]));
        stop += buf;
        std::snprintf(buf, sizeof buf, ",%llu", static_cast<unsigned long long>(row.departures[i]));
        road += buf;
        std::snprintf(buf, sizeof buf, ",%.3f", row.stop_time[i]);
        stime += buf;
    }
    std::snprintf(buf, sizeof buf, ",%llu,%.3f\n", static_cast<unsigned long long>(row.total_stops),
                  row.avg_stops_per_vehicle);
    stop += buf;
    std::snprintf(buf, sizeof buf, ",%llu,%.3f\n", static_cast<unsigned long long>(row.total_departed),
                  row.avg_departed_per_lane);
    road += buf;
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f\n", row.total_stop_time, row.avg_stop_time_per_vehicle);
    stime += buf;
    put(stop_.get(), stop.c_str());
    put(road_.get(), road.c_str());
    put(stop_time_.get(), stime.c_str());
}

void CsvOutputs::close() {
    for (File* f : {&car_, &stop_, &road_, &stop_time_}) {
        if (*f && std::fclose(f->release()) != 0) throw IoError("closing output file failed");
    }
}

}  // namespace cvsim
