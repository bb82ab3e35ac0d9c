#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/browser.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::capture {

/// Maps a Chrome network error ("net::ERR_NAME_NOT_RESOLVED", ...) to the failure taxonomy.
CaptureErrorKind classify_net_error(const std::string& error_text);

/// Parses the DevToolsActivePort file: port on the first line, browser websocket path on the second.
std::optional<std::pair<int, std::string>> parse_devtools_active_port(const std::string& contents);

/// Page-side script that walks the rendered DOM and returns the node list as a JSON string.
const std::string& dom_extraction_script();

/// Converts the extraction script's output into snapshot nodes. Throws SnapshotError
/// when the document has no html root or body.
std::vector<DomNode> nodes_from_extraction(const nlohmann::json& doc);

/// Browser binary from the explicit path, then $CONSENTSCAN_BROWSER, then well-known names on PATH.
/// Returns an empty path when nothing is found.
std::filesystem::path find_browser(const std::string& explicit_path = "");

/// A headless Chrome instance driven over the DevTools protocol, one tab per session.
class ChromeSession final : public BrowserSession {
public:
    /// Launches the browser. Throws std::runtime_error when it cannot be started.
    ChromeSession(const std::filesystem::path& browser, const CaptureConfig& config);
    ~ChromeSession() override;

    CaptureResult capture_page(const std::string& url) override;
    void clear_state() override;
    ClickResult click_and_capture(const std::string& text, int notice_node) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class ChromeBrowserFactory final : public BrowserFactory {
public:
    ChromeBrowserFactory(std::filesystem::path browser, CaptureConfig config);
    std::unique_ptr<BrowserSession> create() override;

private:
    std::filesystem::path browser_;
    CaptureConfig config_;
};

} // namespace consentscan::capture
