#include "consentscan/outcome.hpp"

#include <nlohmann/json.hpp>

namespace consentscan::interaction {

using nlohmann::json;

json to_json(const ClickOutcome& o)
{
    json cookies = json::array();
    for (const auto& c : o.cookies_delta) cookies.push_back(consentscan::to_json(c));
    json requests = json::array();
    for (const auto& r : o.requests_delta) requests.push_back(consentscan::to_json(r));
    json j = {
        {"clickable", to_json(o.clickable)},
        {"clicked", o.clicked()},
        {"post_screenshot", o.post_screenshot_ref.empty() ? json(nullptr) : json(o.post_screenshot_ref)},
        {"ssim_vs_initial", o.ssim_vs_initial},
        {"cookies_delta", std::move(cookies)},
        {"requests_delta", std::move(requests)},
        {"final_url", o.final_url},
        {"navigated", o.navigated},
        {"error", o.error ? json(*o.error) : json(nullptr)},
    };
    return j;
}

} // namespace consentscan::interaction
