#include <tessera/server/ws_server.hpp>

#include <gtest/gtest.h>

#include <thread>

using namespace tessera;
using namespace tessera::server;

namespace {

struct Running {
    net::io_context ioc;
    WsServer server{ioc, "127.0.0.1", 0};
    std::thread thread;

    Running() {
        server.start();
        thread = std::thread([this] { ioc.run(); });
    }

    ~Running() {
        server.stop();
        ioc.stop();
        thread.join();
    }
};

class Client {
public:
    explicit Client(unsigned short port) {
        tcp::resolver resolver(ioc_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/");
        ws_.text(true);
    }

    ~Client() {
        beast::error_code ignored;
        ws_.close(websocket::close_code::normal, ignored);
    }

    void send(const std::string& text) { ws_.write(net::buffer(text)); }

    WireMessage receive() {
        beast::flat_buffer buf;
        ws_.read(buf);
        return wire::decode(beast::buffers_to_string(buf.data()));
    }

private:
    net::io_context ioc_;
    websocket::stream<tcp::socket> ws_{ioc_};
};

}  // namespace

TEST(WsServer, ScriptedClientSession) {
    Running srv;
    Client c(srv.server.port());
    c.send(R"({"type":"load","model":"game_of_life","params":{"width":5,"height":5},"seed":1})");
    auto loaded = c.receive();
    EXPECT_EQ(loaded.type, "loaded");
    EXPECT_EQ(loaded.body.at("width"), 5);

    c.send(R"({"type":"subscribe","povs":["life"],"probes":true})");
    EXPECT_EQ(c.receive().type, "ack");
    auto first = c.receive();
    EXPECT_EQ(first.type, "tick");
    EXPECT_EQ(first.body.at("frames").at("life").at("cells").size(), 75u);

    c.send(R"({"type":"step","count":2})");
    EXPECT_EQ(c.receive().body.at("tick"), 1);
    EXPECT_EQ(c.receive().body.at("tick"), 2);
    auto tl = c.receive();
    EXPECT_EQ(tl.type, "timeline");
    EXPECT_EQ(tl.body.at("max"), 2);

    c.send(R"({"type":"rewind","tick":9})");
    auto err = c.receive();
    EXPECT_EQ(err.type, "error");
    EXPECT_EQ(err.body.at("code"), "E_BAD_TICK");

    c.send("not json");
    EXPECT_EQ(c.receive().body.at("code"), "E_MALFORMED");
}

TEST(WsServer, PlayStreamsTicksOverTheWire) {
    Running srv;
    Client c(srv.server.port());
    c.send(R"({"type":"load","model":"institutions","seed":1})");
    c.receive();
    c.send(R"({"type":"play","tps":50})");
    EXPECT_EQ(c.receive().type, "ack");
    for (std::uint64_t t = 1; t <= 5; ++t) {
        auto ev = c.receive();
        ASSERT_EQ(ev.type, "tick");
        EXPECT_EQ(ev.body.at("tick"), t);
    }
    c.send(R"({"type":"pause"})");
}

TEST(WsServer, ClientsGetSeparateSessions) {
    Running srv;
    Client a(srv.server.port());
    Client b(srv.server.port());
    a.send(R"({"type":"load","model":"game_of_life","seed":1})");
    EXPECT_EQ(a.receive().type, "loaded");
    b.send(R"({"type":"step","count":1})");
    EXPECT_EQ(b.receive().body.at("code"), "E_NOT_LOADED");
}

TEST(WsServer, PortInUseIsReported) {
    Running srv;
    net::io_context other;
    try {
        WsServer second(other, "127.0.0.1", srv.server.port());
        FAIL() << "second bind succeeded";
    } catch (const boost::system::system_error& e) {
        EXPECT_EQ(e.code(), net::error::address_in_use);
    }
}
