#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "consentscan/fixtures.hpp"

namespace httplib {
class Server;
}

namespace consentscan::fixtures {

/// Plain-HTTP server for the fixture corpus.
///
/// Routes: `/f/<id>` (fixture page), `/slow?s=N` (responds after N seconds),
/// `/manifest.json`, anything else 404.
class FixtureServer {
public:
    explicit FixtureServer(const Corpus& corpus);
    ~FixtureServer();

    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    /// Binds and starts serving in a background thread; port 0 picks a free port.
    /// Returns the bound port. Throws std::runtime_error on bind failure.
    int start(int port = 0, const std::string& host = "127.0.0.1");
    /// Blocks serving on the calling thread until stop() is called from elsewhere.
    void serve_forever(int port, const std::string& host = "127.0.0.1");
    void stop();

    int port() const { return port_; }
    std::string base_url() const;

private:
    void install_routes();
    bool sleep_interruptibly(std::chrono::milliseconds d);

    const Corpus& corpus_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_ = "127.0.0.1";
    int port_ = 0;
    std::mutex mutex_;
    std::condition_variable stopping_cv_;
    bool stopping_ = false;
};

} // namespace consentscan::fixtures
