#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/clickables.hpp"
#include "consentscan/image.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::interaction {

/// Result of clicking one clickable on a fresh page load.
struct ClickOutcome {
    Clickable clickable;
    RgbImage post_screenshot;        // empty when the click did not happen
    std::string post_screenshot_ref; // relative file path once persisted
    double ssim_vs_initial = 0.0;
    std::vector<CookieRecord> cookies_delta;
    std::vector<RequestRecord> requests_delta;
    std::string body_text; // post-click page text
    std::string final_url;
    bool navigated = false;
    /// Set for checkboxes, which are recorded but not clicked.
    bool observed_only = false;
    std::optional<std::string> error;

    bool clicked() const { return !observed_only && !error && !post_screenshot.empty(); }
};

/// Serializes everything except the in-memory screenshot (referenced by path).
nlohmann::json to_json(const ClickOutcome& o);

} // namespace consentscan::interaction
