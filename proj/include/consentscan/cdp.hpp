#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace consentscan::cdp {

class CdpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Command did not complete in time.
class CdpTimeout : public CdpError {
public:
    using CdpError::CdpError;
};

/// A DevTools protocol connection over one websocket.
///
/// Synchronous: `call` writes a command and reads messages until the matching
/// response arrives; events read meanwhile go to the event handler.
class Connection {
public:
    using EventHandler = std::function<void(const std::string& method, const nlohmann::json& params,
                                            const std::string& session_id)>;

    Connection();
    ~Connection();
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    /// Connects to ws://host:port/path. Throws CdpError.
    void connect(const std::string& host, int port, const std::string& path,
                 std::chrono::milliseconds timeout = std::chrono::seconds(10));
    void close();
    bool is_open() const;

    void on_event(EventHandler handler) { handler_ = std::move(handler); }

    /// Sends a command and returns its `result`. Throws CdpError on a protocol
    /// error response and CdpTimeout when no response arrives in time.
    nlohmann::json call(const std::string& method, const nlohmann::json& params = nlohmann::json::object(),
                        const std::string& session_id = "",
                        std::chrono::milliseconds timeout = std::chrono::seconds(30));

    /// Reads and dispatches events until `deadline` or until `done` returns true.
    /// Returns whether `done` became true.
    bool pump_until(std::chrono::steady_clock::time_point deadline, const std::function<bool()>& done = {});

private:
    struct Impl;
    /// Reads one message; nullopt when the deadline passes first.
    std::optional<nlohmann::json> read(std::chrono::steady_clock::time_point deadline);
    void dispatch(const nlohmann::json& msg);

    std::unique_ptr<Impl> impl_;
    EventHandler handler_;
    long long next_id_ = 1;
};

} // namespace consentscan::cdp
