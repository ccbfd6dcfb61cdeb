#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "cvsim/engine.hpp"
#include "cvsim/protocol.hpp"
#include "cvsim/snapshot.hpp"
#include "cvsim/speed_mode.hpp"

namespace cvsim {

struct CommandResult {
    std::string request_id;
    bool ok = true;
    std::string message;
};

using ReplyFn = std::function<void(const CommandResult&)>;

/// Thread-safe inbox between client threads and the world's thread. Commands are
/// applied in arrival order between ticks; each carries its own reply callback, invoked
/// on the world's thread.
class CommandMailbox {
public:
    void post(Command c, ReplyFn reply = {});

    /// Takes every queued command.
    std::deque<std::pair<Command, ReplyFn>> drain();

    /// Blocks until the deadline or until something is posted.
    void wait_until(std::chrono::steady_clock::time_point deadline);

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::pair<Command, ReplyFn>> queue_;
};

struct RunOptions {
    SimConfig config;
    SignalPlan plan = default_plan();
    std::shared_ptr<const GuidanceStrategy> strategy;
    SpeedMode mode = SpeedMode::Headless;
    double duration_s = 3600.0;  // <= 0: until END or anomaly
    double warmup_s = 0.0;
    std::filesystem::path out_base = "result";
    bool write_outputs = true;
    /// Fixed clock for the run-directory stamp; wall clock when empty.
    std::optional<std::chrono::system_clock::time_point> stamp;
    /// Called on the world's thread after every step.
    std::function<void(const World&, const StepEvents&)> observer;
    /// Wall-clock interval between published snapshots.
    std::chrono::milliseconds snapshot_period{100};
};

struct RunResult {
    WorldStatus status = WorldStatus::Running;
    std::optional<Anomaly> anomaly;
    std::filesystem::path run_dir;  // empty when outputs are disabled
    std::uint64_t ticks = 0;
    WindowSummary warmup;
};

/// Owns one world and drives it: pacing per speed mode, command application between
/// ticks, snapshot publication, CSV and run-log output.
class Runner {
public:
    /// Validates config and plan; throws ConfigError before anything is written.
    explicit Runner(RunOptions options);
    ~Runner();

    CommandMailbox& mailbox() noexcept { return mailbox_; }

    /// Blocks until duration, END, or anomaly.
    RunResult run();

    /// Latest published snapshot (never null once constructed).
    std::shared_ptr<const Snapshot> latest_snapshot() const;

    SpeedMode mode() const noexcept { return mode_.load(); }
    const World& world() const noexcept { return world_; }

    /// Called after each publication with the new snapshot (on the world's thread).
    std::function<void(std::shared_ptr<const Snapshot>)> on_snapshot;

private:
    void apply(Command& c, const ReplyFn& reply);
    void publish();
    void log(const std::string& line);

    RunOptions opts_;
    World world_;
    CommandMailbox mailbox_;
    std::atomic<SpeedMode> mode_;
    mutable std::mutex snap_mu_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::unique_ptr<CsvOutputs> csv_;
    std::FILE* log_ = nullptr;
    std::filesystem::path dir_;
    bool pacing_reset_ = false;
};

/// Writes "<dir>/config.json" with the resolved configuration and signal plan.
void write_config_echo(const std::filesystem::path& dir, const SimConfig& cfg, const SignalPlan& plan,
                       SpeedMode mode, double duration_s, double warmup_s);

}  // namespace cvsim
