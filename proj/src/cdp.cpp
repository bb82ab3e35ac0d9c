#include "consentscan/cdp.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace consentscan::cdp {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

struct Connection::Impl {
    asio::io_context ioc;
    websocket::stream<beast::tcp_stream> ws{ioc};
    bool open = false;

    // A read stays outstanding across calls so that a deadline never has to cancel it.
    beast::flat_buffer buffer;
    bool read_pending = false;
    bool read_done = false;
    beast::error_code read_ec;

    /// Runs handlers until `finished` or the deadline passes. Returns `finished`.
    bool run_until(const bool& finished, std::chrono::steady_clock::time_point deadline)
    {
        ioc.restart();
        while (!finished) {
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) break;
            ioc.run_one_for(deadline - now);
        }
        return finished;
    }

    void fail()
    {
        open = false;
        beast::error_code ec;
        beast::get_lowest_layer(ws).socket().close(ec);
    }
};

Connection::Connection() : impl_(std::make_unique<Impl>()) {}

Connection::~Connection()
{
    close();
}

void Connection::connect(const std::string& host, int port, const std::string& path, std::chrono::milliseconds timeout)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    beast::error_code ec;
    tcp::resolver resolver(impl_->ioc);
    const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
    if (ec) throw CdpError("resolve " + host + ": " + ec.message());

    bool done = false;
    beast::get_lowest_layer(impl_->ws).async_connect(endpoints, [&](beast::error_code e, const tcp::endpoint&) {
        ec = e;
        done = true;
    });
    if (!impl_->run_until(done, deadline)) {
        impl_->fail();
        throw CdpTimeout("connect to DevTools timed out");
    }
    if (ec) throw CdpError("connect to DevTools: " + ec.message());

    impl_->ws.read_message_max(64 * 1024 * 1024);
    done = false;
    impl_->ws.async_handshake(host + ":" + std::to_string(port), path, [&](beast::error_code e) {
        ec = e;
        done = true;
    });
    if (!impl_->run_until(done, deadline)) {
        impl_->fail();
        throw CdpTimeout("websocket handshake timed out");
    }
    if (ec) throw CdpError("websocket handshake: " + ec.message());
    impl_->open = true;
}

void Connection::close()
{
    if (!impl_ || !impl_->open) return;
    impl_->fail();
}

bool Connection::is_open() const
{
    return impl_->open;
}

std::optional<json> Connection::read(std::chrono::steady_clock::time_point deadline)
{
    if (!impl_->open) throw CdpError("connection is closed");
    if (!impl_->read_pending) {
        impl_->read_pending = true;
        impl_->read_done = false;
        impl_->buffer.clear();
        impl_->ws.async_read(impl_->buffer, [impl = impl_.get()](beast::error_code e, std::size_t) {
            impl->read_ec = e;
            impl->read_done = true;
        });
    }
    if (!impl_->run_until(impl_->read_done, deadline)) return std::nullopt;
    impl_->read_pending = false;
    if (impl_->read_ec) {
        impl_->fail();
        throw CdpError("websocket read: " + impl_->read_ec.message());
    }
    try {
        return json::parse(beast::buffers_to_string(impl_->buffer.data()));
    } catch (const json::exception& e) {
        throw CdpError(std::string("malformed DevTools message: ") + e.what());
    }
}

void Connection::dispatch(const json& msg)
{
    if (!handler_ || !msg.contains("method")) return;
    handler_(msg.at("method").get<std::string>(), msg.value("params", json::object()), msg.value("sessionId", ""));
}

json Connection::call(const std::string& method, const json& params, const std::string& session_id,
                      std::chrono::milliseconds timeout)
{
    if (!impl_->open) throw CdpError("connection is closed");
    const long long id = next_id_++;
    json msg = {{"id", id}, {"method", method}, {"params", params}};
    if (!session_id.empty()) msg["sessionId"] = session_id;
    const auto deadline = std::chrono::steady_clock::now() + timeout;

    bool done = false;
    beast::error_code ec;
    const auto text = msg.dump();
    impl_->ws.text(true);
    impl_->ws.async_write(asio::buffer(text), [&](beast::error_code e, std::size_t) {
        ec = e;
        done = true;
    });
    if (!impl_->run_until(done, deadline)) {
        impl_->fail();
        throw CdpTimeout(method + ": write timed out");
    }
    if (ec) {
        impl_->fail();
        throw CdpError(method + ": " + ec.message());
    }

    while (true) {
        auto reply = read(deadline);
        if (!reply) throw CdpTimeout(method + ": no response within " + std::to_string(timeout.count()) + " ms");
        if (reply->contains("id") && reply->at("id").get<long long>() == id) {
            if (reply->contains("error")) {
                const auto& err = reply->at("error");
                throw CdpError(method + ": " + err.value("message", err.dump()));
            }
            return reply->value("result", json::object());
        }
        dispatch(*reply);
    }
}

bool Connection::pump_until(std::chrono::steady_clock::time_point deadline, const std::function<bool()>& done)
{
    while (!(done && done())) {
        if (std::chrono::steady_clock::now() >= deadline) return false;
        auto msg = read(deadline);
        if (!msg) return done && done();
        dispatch(*msg);
    }
    return true;
}

} // namespace consentscan::cdp
