#include "cvsim/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cvsim {

void CommandMailbox::post(Command c, ReplyFn reply) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        queue_.emplace_back(std::move(c), std::move(reply));
    }
    cv_.notify_all();
}

std::deque<std::pair<Command, ReplyFn>> CommandMailbox::drain() {
    std::lock_guard<std::mutex> lock(mu_);
    std::deque<std::pair<Command, ReplyFn>> out;
    out.swap(queue_);
    return out;
}

void CommandMailbox::wait_until(std::chrono::steady_clock::time_point deadline) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait_until(lock, deadline, [&] { return !queue_.empty(); });
}

void write_config_echo(const std::filesystem::path& dir, const SimConfig& cfg, const SignalPlan& plan,
                       SpeedMode mode, double duration_s, double warmup_s) {
    nlohmann::json j{{"config", to_json(cfg)},
                     {"plan", to_json(plan)},
                     {"mode", to_string(mode)},
                     {"duration_s", duration_s},
                     {"warmup_s", warmup_s}};
    std::ofstream out(dir / "config.json");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("cannot write '" + (dir / "config.json").string() + "'");
}

Runner::Runner(RunOptions options)
    : opts_(std::move(options)),
      world_(opts_.config, opts_.plan, opts_.strategy, opts_.warmup_s),
      mode_(opts_.mode) {
    if (!(opts_.warmup_s >= 0.0)) throw ConfigError("warmup must be >= 0");
    if (!std::isfinite(opts_.duration_s)) throw ConfigError("duration must be finite");
    if (opts_.write_outputs) {
        dir_ = create_run_directory(opts_.out_base, std::string(to_string(opts_.mode)),
                                    opts_.stamp.value_or(std::chrono::system_clock::now()));
        write_config_echo(dir_, world_.config(), world_.plan(), opts_.mode, opts_.duration_s, opts_.warmup_s);
        csv_ = std::make_unique<CsvOutputs>(dir_);
        log_ = std::fopen((dir_ / "run.log").string().c_str(), "wb");
        if (!log_) throw IoError("cannot open '" + (dir_ / "run.log").string() + "'");
        world_.on_car = [this](const CarRecord& r) { csv_->write_car(r); };
        world_.on_tick_row = [this](const TickRow& row) { csv_->write_tick(row); };
    }

    const SimConfig& cfg = world_.config();
    char buf[160];
    std::snprintf(buf, sizeof buf, "seed %llu", static_cast<unsigned long long>(cfg.seed));
    log(buf);
    std::snprintf(buf, sizeof buf, "mode %s", std::string(to_string(opts_.mode)).c_str());
    log(buf);
    std::snprintf(buf, sizeof buf, "duration %.3f s, warmup %.3f s, tick %.3f s", opts_.duration_s, opts_.warmup_s,
                  cfg.tick_s);
    log(buf);
    for (Approach a : kApproaches) {
        std::snprintf(buf, sizeof buf, "flow %s %.3f veh/h, lambda %.3f/s", std::string(to_string(a)).c_str(),
                      cfg.flow(a), cfg.flow(a) / 3600.0);
        log(buf);
    }
    std::snprintf(buf, sizeof buf, "equipped_ratio %.3f", cfg.equipped_ratio);
    log(buf);
    std::snprintf(buf, sizeof buf, "strategy %s", world_.strategy().name().c_str());
    log(buf);
    std::snprintf(buf, sizeof buf, "plan cycle %.3f s", world_.plan().cycle_s);
    log(buf);
    publish();
}

Runner::~Runner() {
    if (log_) std::fclose(log_);
}

void Runner::log(const std::string& line) {
    if (!log_) return;
    if (std::fprintf(log_, "%s\n", line.c_str()) < 0) throw IoError("writing run.log failed");
}

std::shared_ptr<const Snapshot> Runner::latest_snapshot() const {
    std::lock_guard<std::mutex> lock(snap_mu_);
    return snapshot_;
}

void Runner::publish() {
    auto snap = std::make_shared<const Snapshot>(snapshot_of(world_, mode_.load()));
    {
        std::lock_guard<std::mutex> lock(snap_mu_);
        snapshot_ = snap;
    }
    if (on_snapshot) on_snapshot(snap);
}

void Runner::apply(Command& c, const ReplyFn& reply) {
    CommandResult res{c.request_id, true, {}};
    char buf[160];
    try {
        if (auto* f = std::get_if<SetFlow>(&c.body)) {
            world_.set_flow(f->approach, f->veh_per_hour);
            std::snprintf(buf, sizeof buf, "t=%.1f set_flow %s %.3f veh/h, lambda %.3f/s", world_.clock(),
                          std::string(to_string(f->approach)).c_str(), f->veh_per_hour, f->veh_per_hour / 3600.0);
        } else if (auto* r = std::get_if<SetRatio>(&c.body)) {
            world_.set_ratio(r->ratio);
            std::snprintf(buf, sizeof buf, "t=%.1f set_ratio %.3f", world_.clock(), r->ratio);
        } else if (auto* s = std::get_if<SetSpeed>(&c.body)) {
            mode_ = s->mode;
            pacing_reset_ = true;
            std::snprintf(buf, sizeof buf, "t=%.1f set_speed %s", world_.clock(), std::string(to_string(s->mode)).c_str());
        } else if (auto* p = std::get_if<SetPlan>(&c.body)) {
            world_.set_plan(p->plan);
            std::snprintf(buf, sizeof buf, "t=%.1f set_plan cycle %.3f s", world_.clock(), p->plan.cycle_s);
        } else {
            world_.end();
            std::snprintf(buf, sizeof buf, "t=%.1f end", world_.clock());
        }
        log(buf);
    } catch (const ConfigError& e) {
        res.ok = false;
        res.message = e.what();
    }
    if (reply) reply(res);
    publish();
}

RunResult Runner::run() {
    using clock = std::chrono::steady_clock;
    const double dt = world_.config().tick_s;
    const std::uint64_t target =
        opts_.duration_s > 0.0 ? static_cast<std::uint64_t>(std::llround(opts_.duration_s / dt)) : 0;

    auto anchor = clock::now();
    std::uint64_t anchor_tick = world_.tick();
    auto last_pub = anchor;

    while (world_.status() == WorldStatus::Running) {
        for (auto& [cmd, reply] : mailbox_.drain()) apply(cmd, reply);
        if (world_.status() != WorldStatus::Running) break;
        if (target && world_.tick() >= target) {
            world_.end();
            break;
        }

        const SpeedMode m = mode_.load();
        auto now = clock::now();
        if (pacing_reset_) {
            anchor = now;
            anchor_tick = world_.tick();
            pacing_reset_ = false;
        }
        if (m != SpeedMode::Headless) {
            const double due = static_cast<double>(world_.tick() - anchor_tick) / steps_per_second(m, dt);
            const auto deadline = anchor + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(due));
            if (now < deadline) {
                mailbox_.wait_until(std::min(deadline, last_pub + opts_.snapshot_period));
                if (clock::now() - last_pub >= opts_.snapshot_period) {
                    publish();
                    last_pub = clock::now();
                }
                continue;
            }
        }

        const StepEvents ev = world_.step();
        if (opts_.observer) opts_.observer(world_, ev);
        if (ev.anomaly) log("anomaly: " + ev.anomaly->message);

        now = clock::now();
        if (now - last_pub >= opts_.snapshot_period) {
            publish();
            last_pub = now;
        }
    }

    RunResult res;
    res.status = world_.status();
    res.anomaly = world_.anomaly();
    res.ticks = world_.tick();
    res.warmup = world_.metrics().warmup_window();
    res.run_dir = dir_;

    const MetricsAccumulator& mt = world_.metrics();
    char buf[200];
    std::snprintf(buf, sizeof buf, "status %s after %llu ticks (%.1f s)", std::string(to_string(res.status)).c_str(),
                  static_cast<unsigned long long>(res.ticks), world_.clock());
    log(buf);
    std::snprintf(buf, sizeof buf, "spawned %llu, departed %llu, pending %llu, stops %llu, stop time %.3f s",
                  static_cast<unsigned long long>(mt.spawned()), static_cast<unsigned long long>(mt.departed()),
                  static_cast<unsigned long long>(world_.pending().size()),
                  static_cast<unsigned long long>(mt.total_stops()), mt.total_stop_time());
    log(buf);
    std::snprintf(buf, sizeof buf, "after warmup %.1f s: completed %llu, mean delta %.3f s, stops %llu, stop time %.3f s",
                  res.warmup.from_s, static_cast<unsigned long long>(res.warmup.completed), res.warmup.mean_delta,
                  static_cast<unsigned long long>(res.warmup.stops), res.warmup.stop_time);
    log(buf);
    if (csv_) csv_->close();
    if (log_) {
        std::fclose(log_);
        log_ = nullptr;
    }
    publish();
    return res;
}

}  // namespace cvsim
