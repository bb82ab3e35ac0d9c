#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "consentscan/fixture_server.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace consentscan::fixtures {

namespace {

constexpr const char* not_found_page =
    "<!DOCTYPE html>\n<html><head><title>Not found</title></head><body></body></html>\n";

std::string slow_page(long long seconds)
{
    return "<!DOCTYPE html>\n<html><head><title>slow</title></head><body><p>Waited " + std::to_string(seconds) +
           " s</p></body></html>\n";
}

} // namespace

FixtureServer::FixtureServer(const Corpus& corpus) : corpus_(corpus), server_(std::make_unique<httplib::Server>())
{
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    install_routes();
}

FixtureServer::~FixtureServer()
{
    stop();
}

void FixtureServer::install_routes()
{
    server_->Get(R"(/f/([^/]+)/?)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto* fx = corpus_.find(req.matches[1]);
        if (!fx) {
            res.status = 404;
            res.set_content(not_found_page, "text/html; charset=utf-8");
            return;
        }
        res.set_content(render_html(*fx), "text/html; charset=utf-8");
    });
    server_->Get("/slow", [this](const httplib::Request& req, httplib::Response& res) {
        long long seconds = 0;
        try {
            seconds = req.has_param("s") ? std::stoll(req.get_param_value("s")) : 0;
        } catch (const std::exception&) {
            res.status = 400;
            return;
        }
        if (!sleep_interruptibly(std::chrono::seconds(std::max(0LL, seconds)))) {
            res.status = 503;
            return;
        }
        res.set_content(slow_page(seconds), "text/html; charset=utf-8");
    });
    server_->Get("/manifest.json", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(manifest(corpus_).dump(2), "application/json");
    });
    server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.status == 404 && res.body.empty()) res.set_content(not_found_page, "text/html; charset=utf-8");
    });
}

bool FixtureServer::sleep_interruptibly(std::chrono::milliseconds d)
{
    std::unique_lock lock(mutex_);
    return !stopping_cv_.wait_for(lock, d, [this] { return stopping_; });
}

int FixtureServer::start(int port, const std::string& host)
{
    host_ = host;
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ < 0) {
        throw std::runtime_error("cannot bind fixture server to " + host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void FixtureServer::serve_forever(int port, const std::string& host)
{
    host_ = host;
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ < 0) {
        throw std::runtime_error("cannot bind fixture server to " + host + ":" + std::to_string(port));
    }
    server_->listen_after_bind();
}

void FixtureServer::stop()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    stopping_cv_.notify_all();
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string FixtureServer::base_url() const
{
    return "http://" + host_ + ":" + std::to_string(port_);
}

} // namespace consentscan::fixtures
