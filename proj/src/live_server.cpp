#include "cvsim/live_server.hpp"

#include <atomic>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace cvsim {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string mime_type(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
    if (ext == ".css") return "text/css; charset=utf-8";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    if (ext == ".ico") return "image/x-icon";
    if (ext == ".map" || ext == ".txt") return "text/plain; charset=utf-8";
    return "application/octet-stream";
}

std::filesystem::path resolve_static_path(const std::filesystem::path& root, const std::string& target) {
    std::string path = target.substr(0, target.find_first_of("?#"));
    if (path.empty() || path.front() != '/') return {};
    if (path.find("..") != std::string::npos || path.find('\\') != std::string::npos ||
        path.find('\0') != std::string::npos) {
        return {};
    }
    if (path.back() == '/') path += "index.html";
    return root / path.substr(1);
}

namespace {

const char* const kFallbackPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>cvsim</title></head>"
    "<body><p>cvsim live server. Connect a WebSocket client to this port.</p></body></html>\n";

}  // namespace

class WsSession;

struct LiveServer::Impl {
    Runner& runner;
    std::filesystem::path ui_dir;
    asio::io_context ioc;
    tcp::acceptor acceptor;
    asio::steady_timer ticker;
    std::set<std::shared_ptr<WsSession>> sessions;
    std::thread thread;
    std::atomic<bool> finished{false};
    std::shared_ptr<const Snapshot> last_sent;

    Impl(Runner& r, unsigned short port, std::filesystem::path dir)
        : runner(r), ui_dir(std::move(dir)), acceptor(ioc), ticker(ioc) {
        tcp::endpoint ep(asio::ip::make_address("0.0.0.0"), port);
        acceptor.open(ep.protocol());
        acceptor.set_option(asio::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
    }

    void accept();
    void schedule_tick();
    void broadcast(const std::string& text);
    std::string snapshot_text();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, LiveServer::Impl& server) : ws_(std::move(socket)), server_(server) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->server_.sessions.insert(self);
            self->send(self->server_.snapshot_text(), true);
            self->read();
        });
    }

    /// Replies are always queued; snapshots are dropped while the client lags.
    void send(std::string text, bool is_snapshot = false) {
        if (closed_) return;
        if (is_snapshot && queue_.size() > 4) return;
        queue_.push_back(std::move(text));
        if (queue_.size() == 1) write();
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        beast::error_code ec;
        ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ec);
        ws_.next_layer().socket().close(ec);
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->server_.sessions.erase(self);
                self->closed_ = true;
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->handle(text);
            self->read();
        });
    }

    void handle(const std::string& text) {
        Command cmd;
        try {
            cmd = parse_command(text);
        } catch (const ProtocolError& e) {
            send(error_reply(e.request_id(), e.what()).dump());
            return;
        }
        if (server_.finished.load()) {
            send(error_reply(cmd.request_id, "simulation has ended").dump());
            return;
        }
        std::weak_ptr<WsSession> weak = shared_from_this();
        asio::io_context& ioc = server_.ioc;
        server_.runner.mailbox().post(std::move(cmd), [weak, &ioc](const CommandResult& r) {
            std::string text = (r.ok ? ack_reply(r.request_id) : error_reply(r.request_id, r.message)).dump();
            asio::post(ioc, [weak, text = std::move(text)]() mutable {
                if (auto s = weak.lock()) s->send(std::move(text));
            });
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->server_.sessions.erase(self);
                self->closed_ = true;
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    LiveServer::Impl& server_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, LiveServer::Impl& server) : stream_(std::move(socket)), server_(server) {}

    void run() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            self->route();
        });
    }

private:
    void route() {
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), server_)->run(std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req_.version());
        res->keep_alive(false);
        res->set(http::field::server, "cvsim");
        if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
            res->result(http::status::method_not_allowed);
            res->set(http::field::content_type, "text/plain");
            res->body() = "method not allowed\n";
        } else {
            const std::string target(req_.target());
            const auto path = resolve_static_path(server_.ui_dir, target);
            std::ifstream in(path, std::ios::binary);
            if (!path.empty() && in) {
                std::ostringstream ss;
                ss << in.rdbuf();
                res->result(http::status::ok);
                res->set(http::field::content_type, mime_type(path));
                res->body() = ss.str();
            } else if (target == "/" || target == "/index.html") {
                res->result(http::status::ok);
                res->set(http::field::content_type, "text/html; charset=utf-8");
                res->body() = kFallbackPage;
            } else {
                res->result(http::status::not_found);
                res->set(http::field::content_type, "text/plain");
                res->body() = "not found\n";
            }
        }
        res->prepare_payload();
        if (req_.method() == http::verb::head) res->body().clear();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ec;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        });
    }

    beast::tcp_stream stream_;
    LiveServer::Impl& server_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

void LiveServer::Impl::accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) return;
        std::make_shared<HttpSession>(std::move(socket), *this)->run();
        accept();
    });
}

std::string LiveServer::Impl::snapshot_text() {
    last_sent = runner.latest_snapshot();
    return to_json(*last_sent).dump();
}

void LiveServer::Impl::broadcast(const std::string& text) {
    // Copy: a failed send can erase from the set.
    auto targets = sessions;
    for (const auto& s : targets) s->send(text, true);
}

void LiveServer::Impl::schedule_tick() {
    ticker.expires_after(std::chrono::milliseconds(100));
    ticker.async_wait([this](beast::error_code ec) {
        if (ec) return;
        if (!sessions.empty()) broadcast(snapshot_text());
        schedule_tick();
    });
}

LiveServer::LiveServer(Runner& runner, unsigned short port, std::filesystem::path ui_dir)
    : impl_(std::make_unique<Impl>(runner, port, std::move(ui_dir))) {}

LiveServer::~LiveServer() { stop(); }

unsigned short LiveServer::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void LiveServer::start() {
    impl_->accept();
    impl_->schedule_tick();
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void LiveServer::stop() {
    if (!impl_->thread.joinable()) return;
    impl_->finished = true;
    asio::post(impl_->ioc, [this] {
        impl_->broadcast(impl_->snapshot_text());
        impl_->ticker.cancel();
        beast::error_code ec;
        impl_->acceptor.close(ec);
    });
    // Give queued frames a moment to drain before tearing the sockets down.
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    asio::post(impl_->ioc, [this] {
        auto all = impl_->sessions;
        for (const auto& s : all) s->close();
        impl_->sessions.clear();
        impl_->ioc.stop();
    });
    impl_->thread.join();
}

RunResult serve(RunOptions options, unsigned short port, const std::filesystem::path& ui_dir) {
    Runner runner(std::move(options));
    LiveServer server(runner, port, ui_dir);
    server.start();
    std::printf("listening on port %u\n", static_cast<unsigned>(server.port()));
    std::fflush(stdout);
    RunResult res = runner.run();
    server.stop();
    return res;
}

}  // namespace cvsim
