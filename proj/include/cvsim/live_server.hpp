#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cvsim/runner.hpp"

namespace cvsim {

/// Returns the MIME type used for a static file, by extension.
std::string mime_type(const std::filesystem::path& p);

/// Maps a request target onto a file under `root`. Empty when the target is
/// malformed or escapes the root. "/" maps to index.html.
std::filesystem::path resolve_static_path(const std::filesystem::path& root, const std::string& target);

/// WebSocket + HTTP endpoint for one runner. On a single port it serves the static UI
/// bundle over HTTP and upgrades "/ws" (any path, in fact) to a WebSocket carrying the
/// JSON protocol: snapshots out at 10 Hz, commands in with ack/error replies.
class LiveServer {
public:
    /// Binds immediately; port 0 picks a free port (see port()).
    LiveServer(Runner& runner, unsigned short port, std::filesystem::path ui_dir);
    ~LiveServer();
    LiveServer(const LiveServer&) = delete;
    LiveServer& operator=(const LiveServer&) = delete;

    unsigned short port() const noexcept;

    /// Starts the network thread.
    void start();

    /// Tells clients the run is over, flushes a final snapshot, stops the thread.
    void stop();

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// Runs a world with the live server attached, on the calling thread, until END,
/// duration or anomaly. Prints the bound port to stdout.
RunResult serve(RunOptions options, unsigned short port, const std::filesystem::path& ui_dir);

}  // namespace cvsim
