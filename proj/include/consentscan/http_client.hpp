#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace consentscan::http {

struct Response {
    int status = 0;
    std::string body;
};

class HttpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Blocking GET of an http(s) URL. Throws HttpError on transport failure; HTTP
/// error statuses are returned, not thrown.
Response get(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(30));

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              std::chrono::seconds timeout = std::chrono::seconds(30));

} // namespace consentscan::http
