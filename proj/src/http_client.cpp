#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "consentscan/http_client.hpp"

#include <httplib.h>

namespace consentscan::http {

namespace {

struct Target {
    std::string origin; // scheme://host[:port]
    std::string path;   // path plus query, at least "/"
};

Target split(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw HttpError("not an absolute URL: " + url);
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw HttpError("unsupported scheme: " + scheme);
    }
    const auto path_start = url.find_first_of("/?#", scheme_end + 3);
    Target t;
    t.origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    t.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (const auto hash = t.path.find('#'); hash != std::string::npos) t.path.resize(hash);
    if (t.path.empty() || t.path[0] != '/') t.path.insert(0, "/");
    return t;
}

httplib::Client make_client(const Target& t, std::chrono::seconds timeout)
{
    httplib::Client cli(t.origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_follow_location(true);
    return cli;
}

Response finish(const httplib::Result& res, const std::string& url)
{
    if (!res) {
        throw HttpError("request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
}

} // namespace

Response get(const std::string& url, std::chrono::seconds timeout)
{
    const auto t = split(url);
    auto cli = make_client(t, timeout);
    return finish(cli.Get(t.path), url);
}

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              std::chrono::seconds timeout)
{
    const auto t = split(url);
    auto cli = make_client(t, timeout);
    return finish(cli.Post(t.path, body, content_type), url);
}

} // namespace consentscan::http
