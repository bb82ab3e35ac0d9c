#pragma once

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "consentscan/image.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::capture {

struct CaptureConfig {
    std::chrono::milliseconds settle_wait{5000};
    std::chrono::milliseconds page_timeout{60000};
    Viewport viewport;
    std::string user_agent =
        "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/124.0.0.0 Safari/537.36";
    bool suppress_media = true;
    /// Pages per browser session before it is restarted.
    int recycle_after = 25;

    /// Throws std::invalid_argument unless settle_wait < page_timeout and the viewport is positive.
    void validate() const;
};

enum class CaptureErrorKind { dns_unresolved, unreachable, timeout, scanner_failure };

std::string to_string(CaptureErrorKind k);
CaptureErrorKind parse_capture_error_kind(const std::string& s);

struct CaptureError {
    CaptureErrorKind kind = CaptureErrorKind::scanner_failure;
    std::string detail;
};

using CaptureResult = std::variant<PageSnapshot, CaptureError>;

/// State after clicking an element of the current page.
struct ClickResult {
    RgbImage screenshot;
    std::vector<CookieRecord> cookies;   // full jar, post-click entries tagged post_click
    std::vector<RequestRecord> requests; // requests issued after the click
    std::string body_text;
    std::string final_url;
};

class ClickError : public std::runtime_error {
public:
    enum class Kind { element_not_found, click_failed };

    ClickError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

std::string to_string(ClickError::Kind k);

/// One browser tab owned by a single worker.
class BrowserSession {
public:
    virtual ~BrowserSession() = default;

    /// Loads `url` as a first visit would see it (modulo stored state) and snapshots it after settling.
    virtual CaptureResult capture_page(const std::string& url) = 0;
    /// Drops cookies, cache and storage.
    virtual void clear_state() = 0;
    /// Clicks the element inside `notice_node` of the last capture whose normalized
    /// text equals `text`, waits, and captures the result. Throws ClickError.
    virtual ClickResult click_and_capture(const std::string& text, int notice_node) = 0;
};

class BrowserFactory {
public:
    virtual ~BrowserFactory() = default;
    virtual std::unique_ptr<BrowserSession> create() = 0;
};

} // namespace consentscan::capture
