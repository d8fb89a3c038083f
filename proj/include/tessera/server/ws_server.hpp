#pragma once

// WebSocket transport for sessions (Boost.Beast). Each connection owns one
// Session. Commands and play ticks for that session run on a single strand,
// so a session never sees two actions at once.

#include "tessera/server/session.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>

namespace tessera::server {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

using LogFn = std::function<void(const std::string&)>;

/// Session + play loop on a strand. Outgoing frames go to `sink`, always
/// called on the strand, in order.
class SessionRunner : public std::enable_shared_from_this<SessionRunner> {
public:
    using Strand = net::strand<net::any_io_executor>;
    using Sink = std::function<void(std::string)>;

    SessionRunner(Strand strand, Sink sink, std::string id, std::shared_ptr<const ParamDefaults> defaults = {})
        : strand_(std::move(strand)), timer_(strand_), sink_(std::move(sink)),
          session_(std::move(id), std::move(defaults)) {}

    const Strand& strand() const noexcept { return strand_; }

    /// Queues one incoming frame.
    void post_text(std::string text) {
        net::post(strand_, [self = shared_from_this(), text = std::move(text)] { self->on_text(text); });
    }

    /// Stops the play loop; pending timer callbacks become no-ops.
    void stop() {
        net::post(strand_, [self = shared_from_this()] {
            self->stopped_ = true;
            ++self->generation_;
            self->timer_.cancel();
        });
    }

    /// Runs `fn(session)` on the strand and waits for the result. For callers
    /// outside the io threads only.
    template <class Fn>
    auto inspect(Fn fn) {
        std::promise<decltype(fn(std::declval<const Session&>()))> result;
        auto fut = result.get_future();
        net::post(strand_, [&, self = shared_from_this()] { result.set_value(fn(self->session_)); });
        return fut.get();
    }

private:
    void on_text(const std::string& text) {
        if (stopped_) return;
        const auto before = session_.tps();
        for (const auto& ev : session_.handle_text(text)) sink_(wire::encode(ev));
        if (session_.tps() != before) arm();
    }

    void arm() {
        ++generation_;
        timer_.cancel();
        if (!session_.playing()) return;
        period_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / *session_.tps()));
        due_ = Clock::now() + period_;
        wait(generation_);
    }

    void wait(std::uint64_t gen) {
        timer_.expires_at(due_);
        timer_.async_wait([self = shared_from_this(), gen](beast::error_code ec) {
            if (ec || gen != self->generation_ || self->stopped_) return;
            self->on_tick(gen);
        });
    }

    void on_tick(std::uint64_t gen) {
        if (auto ev = session_.play_tick()) sink_(wire::encode(*ev));
        if (!session_.playing()) return;
        due_ += period_;
        const auto now = Clock::now();
        if (due_ < now) due_ = now;  // fell behind: do not burst to catch up
        wait(gen);
    }

    using Clock = std::chrono::steady_clock;

    Strand strand_;
    net::steady_timer timer_;
    Sink sink_;
    Session session_;
    std::uint64_t generation_ = 0;
    Clock::duration period_{};
    Clock::time_point due_{};
    bool stopped_ = false;
};

/// One WebSocket client.
class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket&& socket, std::string id, LogFn log, std::shared_ptr<const ParamDefaults> defaults)
        : ws_(std::move(socket)), id_(std::move(id)), log_(std::move(log)), defaults_(std::move(defaults)) {}

    void start() {
        // The runner has its own strand; frames hop back onto the socket's.
        runner_ = std::make_shared<SessionRunner>(
            net::make_strand(ws_.get_executor()),
            [weak = weak_from_this()](std::string frame) {
                if (auto self = weak.lock()) {
                    net::post(self->ws_.get_executor(),
                              [self, frame = std::move(frame)]() mutable { self->send(std::move(frame)); });
                }
            },
            id_, defaults_);
        net::dispatch(ws_.get_executor(), [self = shared_from_this()] {
            self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            self->ws_.async_accept([self](beast::error_code ec) { self->on_accept(ec); });
        });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return close("handshake failed: " + ec.message());
        if (log_) log_("session " + id_ + " opened");
        read();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->close(ec == websocket::error::closed ? "closed by client" : ec.message());
            self->runner_->post_text(beast::buffers_to_string(self->buffer_.data()));
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void send(std::string frame) {
        queue_.push_back(std::move(frame));
        if (queue_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->close("write failed: " + ec.message());
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    void close(const std::string& why) {
        if (closed_) return;
        closed_ = true;
        if (runner_) runner_->stop();
        if (log_) log_("session " + id_ + " ended: " + why);
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    std::shared_ptr<SessionRunner> runner_;
    std::string id_;
    LogFn log_;
    std::shared_ptr<const ParamDefaults> defaults_;
    bool closed_ = false;
};

/// Accepts connections and gives each its own session. Binding happens in the
/// constructor, so a taken port surfaces as a boost::system::system_error there.
class WsServer {
public:
    WsServer(net::io_context& ioc, const std::string& address, unsigned short port, LogFn log = {},
             std::shared_ptr<const ParamDefaults> defaults = {})
        : ioc_(ioc), acceptor_(net::make_strand(ioc)), log_(std::move(log)), defaults_(std::move(defaults)) {
        const tcp::endpoint ep(net::ip::make_address(address), port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen(net::socket_base::max_listen_connections);
    }

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    void start() { accept(); }

    void stop() {
        net::post(acceptor_.get_executor(), [this] {
            beast::error_code ignored;
            acceptor_.close(ignored);
        });
    }

    std::size_t sessions_opened() const noexcept { return opened_.load(); }

private:
    void accept() {
        acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                if (ec != net::error::operation_aborted && log_) log_("accept failed: " + ec.message());
                if (!acceptor_.is_open()) return;
            } else {
                const auto n = ++opened_;
                std::make_shared<Connection>(std::move(socket), "s" + std::to_string(n), log_, defaults_)->start();
            }
            accept();
        });
    }

    net::io_context& ioc_;
    tcp::acceptor acceptor_;
    LogFn log_;
    std::shared_ptr<const ParamDefaults> defaults_;
    std::atomic<std::size_t> opened_{0};
};

}  // namespace tessera::server
