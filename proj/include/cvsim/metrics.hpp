#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvsim/config.hpp"
#include "cvsim/vehicle.hpp"

namespace cvsim {

/// Output directory or file could not be created or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ideal time from the spawn point to the stop line: accelerate at a_max from v0 to
/// v_limit, then cruise. Falls back to pure acceleration when the road is too short to
/// reach v_limit.
double theoretical_travel_time(double v0, const SimConfig& cfg) noexcept;

struct CarRecord {
    VehicleId car_id = 0;
    double init_velocity = 0.0;
    double theoretical_time = 0.0;
    double actual_time = 0.0;
    double delta = 0.0;
};

/// Cumulative per-lane counters after one tick.
struct TickRow {
    std::uint64_t tick = 0;
    std::array<std::uint64_t, kLaneCount> stops{};
    std::array<std::uint64_t, kLaneCount> departures{};
    std::array<double, kLaneCount> stop_time{};
    std::uint64_t total_stops = 0;
    std::uint64_t total_departed = 0;
    double total_stop_time = 0.0;
    double avg_stops_per_vehicle = 0.0;
    double avg_departed_per_lane = 0.0;
    double avg_stop_time_per_vehicle = 0.0;
};

/// Aggregates restricted to t >= warmup (vehicles crossing, stops starting, and stop
/// time accrued after the warm-up point).
struct WindowSummary {
    double from_s = 0.0;
    std::uint64_t completed = 0;
    double mean_delta = 0.0;
    std::uint64_t stops = 0;
    double stop_time = 0.0;
};

class MetricsAccumulator {
public:
    explicit MetricsAccumulator(double warmup_s = 0.0) : warmup_s_(warmup_s) {}

    void on_spawn(const Vehicle& v);
    void on_enter(const Vehicle& v);

    /// Finalizes a vehicle that crossed the stop line.
    CarRecord on_departed(const Vehicle& v, const SimConfig& cfg);

    /// Stop-episode and stop-time accounting for every vehicle still before the stop
    /// line; call once per tick after motion. `tick` is the 1-based index of the tick
    /// just completed.
    TickRow record_tick(std::span<Lane> lanes, std::uint64_t tick, const SimConfig& cfg);

    std::uint64_t spawned() const noexcept { return spawned_; }
    std::uint64_t equipped_spawned() const noexcept { return equipped_spawned_; }
    std::uint64_t entered() const noexcept { return entered_; }
    std::uint64_t departed() const noexcept { return total_departed_; }
    std::uint64_t total_stops() const noexcept { return total_stops_; }
    double total_stop_time() const noexcept { return static_cast<double>(total_stop_ticks_) * tick_s_; }
    double sum_delta() const noexcept { return sum_delta_; }
    const std::array<std::uint64_t, kLaneCount>& lane_stops() const noexcept { return stops_; }
    const std::array<std::uint64_t, kLaneCount>& lane_departures() const noexcept { return departures_; }
    double lane_stop_time(LaneId id) const noexcept { return static_cast<double>(stop_ticks_[id.index()]) * tick_s_; }

    WindowSummary warmup_window() const;
    double warmup_s() const noexcept { return warmup_s_; }

private:
    double warmup_s_ = 0.0;
    std::uint64_t spawned_ = 0;
    std::uint64_t equipped_spawned_ = 0;
    std::uint64_t entered_ = 0;
    std::uint64_t total_departed_ = 0;
    std::uint64_t total_stops_ = 0;
    std::uint64_t total_stop_ticks_ = 0;  // stop time is kept in whole ticks
    double tick_s_ = 0.1;
    double sum_delta_ = 0.0;
    std::array<std::uint64_t, kLaneCount> stops_{};
    std::array<std::uint64_t, kLaneCount> departures_{};
    std::array<std::uint64_t, kLaneCount> stop_ticks_{};

    std::uint64_t late_completed_ = 0;
    double late_sum_delta_ = 0.0;
    std::uint64_t late_stops_ = 0;
    std::uint64_t late_stop_ticks_ = 0;
};

/// "YYYYMMDD-HHMMSS-<mode>" in local time.
std::string run_directory_name(std::chrono::system_clock::time_point when, const std::string& mode);

/// Creates <base>/<YYYYMMDD-HHMMSS-mode>; if that exists a suffix _2, _3, ... is added.
std::filesystem::path create_run_directory(const std::filesystem::path& base, const std::string& mode,
                                           std::chrono::system_clock::time_point when);

/// The four CSV tables, streamed as the run progresses:
///   car.csv        car_id,init_velocity,thoritical_time,act_time,delta
///   stop.csv       tick,<12 lanes>,total_stops,avg_stops_per_vehicle
///   road.csv       tick,<12 lanes>,total_departed,avg
///   stop_time.csv  tick,<12 lanes>,total_stop_time,avg_stop_time_per_vehicle
/// Real values use "%.3f"; counts and ids are integers.
class CsvOutputs {
public:
    explicit CsvOutputs(const std::filesystem::path& dir);
    ~CsvOutputs();
    CsvOutputs(const CsvOutputs&) = delete;
    CsvOutputs& operator=(const CsvOutputs&) = delete;

    void write_car(const CarRecord& r);
    void write_tick(const TickRow& row);
    void close();

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    struct FileCloser {
        void operator()(std::FILE* f) const noexcept {
            if (f) std::fclose(f);
        }
    };
    using File = std::unique_ptr<std::FILE, FileCloser>;

    std::filesystem::path dir_;
    File car_, stop_, road_, stop_time_;
};

}  // namespace cvsim
