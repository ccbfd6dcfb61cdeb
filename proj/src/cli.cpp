#include "cvsim/cli.hpp"

#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/system/system_error.hpp>

#include "cvsim/live_server.hpp"
#include "cvsim/runner.hpp"

namespace cvsim {

namespace {

std::array<double, kApproachCount> parse_flows(const std::string& text) {
    std::array<double, kApproachCount> out{};
    std::stringstream ss(text);
    std::string item;
    std::size_t n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == kApproachCount) throw ConfigError("--flows: expected 4 values W,S,E,N");
        try {
            std::size_t used = 0;
            out[n] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--flows: '" + item + "' is not a number");
        }
        ++n;
    }
    if (n != kApproachCount) throw ConfigError("--flows: expected 4 values W,S,E,N");
    return out;
}

}  // namespace

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-intersection connected-vehicle traffic simulator"};
    std::string config_file, plan_file, flows, mode_name = "headless", out_dir = "result", ui_dir = "ui";
    double duration = 3600.0, warmup = 0.0, ratio = 0.0;
    std::uint64_t seed = 0;
    unsigned short port = 0;
    app.add_option("--config", config_file, "JSON file with SimConfig fields");
    auto* duration_opt = app.add_option("--duration", duration, "Simulated seconds (0: until END)");
    app.add_option("--flows", flows, "Per-approach flows in veh/h, W,S,E,N");
    auto* ratio_opt = app.add_option("--ratio", ratio, "Equipped-vehicle ratio in [0,1]");
    auto* seed_opt = app.add_option("--seed", seed, "Random seed");
    app.add_option("--mode", mode_name, "fast|medium|slow|very-slow|headless");
    app.add_option("--plan", plan_file, "JSON signal plan");
    app.add_option("--out", out_dir, "Output base directory");
    app.add_option("--warmup", warmup, "Warm-up time excluded from the summary (s)");
    auto* serve_opt = app.add_option("--serve", port, "Start the live server on this port");
    app.add_option("--ui", ui_dir, "Static UI directory served with --serve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    RunOptions opts;
    try {
        if (!config_file.empty()) opts.config = load_config_file(config_file);
        if (!flows.empty()) opts.config.flows = parse_flows(flows);
        if (*ratio_opt) opts.config.equipped_ratio = ratio;
        if (*seed_opt) opts.config.seed = seed;
        require_valid(opts.config);
        if (!plan_file.empty()) opts.plan = load_plan_file(plan_file);
        const auto mode = parse_speed_mode(mode_name);
        if (!mode) throw ConfigError("--mode: unknown mode '" + mode_name + "'");
        opts.mode = *mode;
        if (duration < 0.0) throw ConfigError("--duration must be >= 0");
        if (warmup < 0.0) throw ConfigError("--warmup must be >= 0");
        opts.duration_s = (*serve_opt && !*duration_opt) ? 0.0 : duration;
        opts.warmup_s = warmup;
        opts.out_base = out_dir;

        RunResult res;
        if (*serve_opt) {
            res = serve(std::move(opts), port, ui_dir);
        } else {
            Runner runner(std::move(opts));
            res = runner.run();
        }
        out << "run directory: " << res.run_dir.string() << "\n";
        out << "status: " << to_string(res.status) << " after " << res.ticks << " ticks\n";
        if (res.anomaly) {
            err << "anomaly: " << res.anomaly->message << " at tick " << res.anomaly->tick << "\n";
            return kExitAnomaly;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const boost::system::system_error& e) {
        err << "server error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace cvsim
