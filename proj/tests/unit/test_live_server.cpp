#include <doctest.h>

#include <fstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "cvsim/live_server.hpp"

using namespace cvsim;
namespace fs = std::filesystem;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

fs::path ui_bundle() {
    const fs::path p = fs::temp_directory_path() / "cvsim-unit" / "ui";
    fs::remove_all(p);
    fs::create_directories(p);
    std::ofstream(p / "index.html") << "<html>ui</html>";
    std::ofstream(p / "app.js") << "console.log(1);";
    return p;
}

struct Client {
    asio::io_context ioc;
    websocket::stream<tcp::socket> ws{ioc};

    explicit Client(unsigned short port) {
        tcp::resolver resolver(ioc);
        asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws.handshake("127.0.0.1", "/ws");
    }

    json read() {
        beast::flat_buffer buf;
        ws.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    }

    void send(const json& j) { ws.write(asio::buffer(j.dump())); }

    /// Next frame that is not a snapshot.
    json reply() {
        for (;;) {
            json j = read();
            if (j["type"] != "snapshot") return j;
        }
    }
};

http::response<http::string_body> fetch(unsigned short port, http::verb verb, const std::string& target) {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    tcp::resolver resolver(ioc);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    http::request<http::empty_body> req{verb, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
}

struct Harness {
    Runner runner;
    LiveServer server;
    std::thread world;

    explicit Harness(const fs::path& ui) : runner(make_options()), server(runner, 0, ui) {
        server.start();
        world = std::thread([this] { runner.run(); });
    }
    ~Harness() {
        runner.mailbox().post(Command{"teardown", End{}});
        if (world.joinable()) world.join();
        server.stop();
    }

    static RunOptions make_options() {
        RunOptions o;
        o.config.seed = 4;
        o.config.flows = {900, 900, 900, 900};
        o.mode = SpeedMode::Fast;
        o.duration_s = 0;
        o.write_outputs = false;
        return o;
    }
};

}  // namespace

TEST_CASE("static helpers") {
    CHECK(mime_type("a/index.html") == "text/html; charset=utf-8");
    CHECK(mime_type("x.js") == "text/javascript; charset=utf-8");
    CHECK(mime_type("x.css") == "text/css; charset=utf-8");
    CHECK(mime_type("x.bin") == "application/octet-stream");
    CHECK(resolve_static_path("/srv", "/") == fs::path("/srv/index.html"));
    CHECK(resolve_static_path("/srv", "/app.js?x=1") == fs::path("/srv/app.js"));
    CHECK(resolve_static_path("/srv", "/../etc/passwd").empty());
    CHECK(resolve_static_path("/srv", "/a\\b").empty());
    CHECK(resolve_static_path("/srv", "relative").empty());
}

TEST_CASE("websocket protocol") {
    Harness h(ui_bundle());
    Client c(h.server.port());

    const auto t0 = std::chrono::steady_clock::now();
    const json first = c.read();
    CHECK(std::chrono::steady_clock::now() - t0 < 200ms);
    CHECK(first["v"] == 1);
    CHECK(first["type"] == "snapshot");
    CHECK(first.contains("stats"));
    CHECK(first.contains("signals"));

    c.send({{"v", 1}, {"type", "set_flow"}, {"request_id", "f1"}, {"approach", "N"}, {"veh_per_hour", 1500}});
    json r = c.reply();
    CHECK(r["type"] == "ack");
    CHECK(r["request_id"] == "f1");
    bool seen = false;
    for (int i = 0; i < 20 && !seen; ++i) {
        const json s = c.read();
        if (s["type"] == "snapshot") seen = snapshot_from_json(s).config.flow(Approach::N) == 1500;
    }
    CHECK(seen);

    SignalPlan bad = default_plan();
    bad.of(LaneId{Approach::E, Movement::R})[0].end_s = 60;
    c.send({{"v", 1}, {"type", "set_plan"}, {"request_id", "p1"}, {"plan", to_json(bad)}});
    r = c.reply();
    CHECK(r["type"] == "error");
    CHECK(r["request_id"] == "p1");
    CHECK(r["message"].get<std::string>().find("ER") != std::string::npos);
    CHECK(h.runner.world().plan() == default_plan());

    c.ws.write(asio::buffer(std::string("{nope")));
    r = c.reply();
    CHECK(r["type"] == "error");

    c.send({{"v", 1}, {"type", "set_speed"}, {"request_id", "s1"}, {"mode", "slow"}});
    CHECK(c.reply()["type"] == "ack");
    CHECK(h.runner.mode() == SpeedMode::Slow);

    c.send({{"v", 1}, {"type", "end"}, {"request_id", "e1"}});
    r = c.reply();
    CHECK(r["type"] == "ack");
    CHECK(r["request_id"] == "e1");
    h.world.join();
    std::thread stopper([&] { h.server.stop(); });
    json last;
    try {
        for (;;) {
            json j = c.read();
            if (j["type"] == "snapshot") last = j;
        }
    } catch (const beast::system_error&) {
    }
    stopper.join();
    REQUIRE_FALSE(last.is_null());
    CHECK(last["status"] == "ended");
}

TEST_CASE("several clients see the same world") {
    Harness h(ui_bundle());
    Client a(h.server.port());
    Client b(h.server.port());
    CHECK(a.read()["type"] == "snapshot");
    CHECK(b.read()["type"] == "snapshot");
    a.send({{"v", 1}, {"type", "set_ratio"}, {"request_id", "r"}, {"ratio", 0.5}});
    CHECK(a.reply()["type"] == "ack");
    bool seen = false;
    for (int i = 0; i < 20 && !seen; ++i) {
        const json s = b.read();
        seen = s["type"] == "snapshot" && s["config"]["equipped_ratio"] == 0.5;
    }
    CHECK(seen);
}

TEST_CASE("static files over http") {
    Harness h(ui_bundle());
    const unsigned short port = h.server.port();

    auto res = fetch(port, http::verb::get, "/");
    CHECK(res.result() == http::status::ok);
    CHECK(res.body() == "<html>ui</html>");
    CHECK(res[http::field::content_type] == "text/html; charset=utf-8");

    res = fetch(port, http::verb::get, "/app.js");
    CHECK(res.result() == http::status::ok);
    CHECK(res[http::field::content_type] == "text/javascript; charset=utf-8");

    CHECK(fetch(port, http::verb::get, "/missing.css").result() == http::status::not_found);
    CHECK(fetch(port, http::verb::get, "/../secret").result() == http::status::not_found);
    CHECK(fetch(port, http::verb::post, "/").result() == http::status::method_not_allowed);
}

TEST_CASE("root falls back to a placeholder without a bundle") {
    Harness h(fs::temp_directory_path() / "cvsim-unit" / "no-such-ui");
    const auto res = fetch(h.server.port(), http::verb::get, "/");
    CHECK(res.result() == http::status::ok);
    CHECK(res.body().find("cvsim") != std::string::npos);
}
