#include "consentscan/interact.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace consentscan::interaction {

namespace {

bool same_cookie(const CookieRecord& a, const CookieRecord& b)
{
    return a.name == b.name && a.domain == b.domain && a.path == b.path && a.value == b.value;
}

std::vector<CookieRecord> cookie_delta(const std::vector<CookieRecord>& before, const std::vector<CookieRecord>& after)
{
    std::vector<CookieRecord> out;
    for (const auto& c : after) {
        const bool known =
            std::any_of(before.begin(), before.end(), [&](const CookieRecord& b) { return same_cookie(b, c); });
        if (!known) {
            out.push_back(c);
            out.back().set_at_phase = Phase::post_click;
        }
    }
    return out;
}

} // namespace

std::vector<ClickOutcome> interact_all(capture::BrowserSession& session, const std::string& url,
                                       const PageSnapshot& initial, const std::vector<Clickable>& clickables,
                                       const scan::DetectorSuite& suite, const darkpattern::SsimParams& ssim_params)
{
    std::vector<ClickOutcome> outcomes;
    outcomes.reserve(clickables.size());
    for (const auto& c : clickables) {
        ClickOutcome o;
        o.clickable = c;
        if (c.kind == ClickableKind::checkbox) {
            o.observed_only = true;
            outcomes.push_back(std::move(o));
            continue;
        }

        session.clear_state();
        auto reloaded = session.capture_page(url);
        if (const auto* err = std::get_if<capture::CaptureError>(&reloaded)) {
            o.error = std::string(reload_failed) + ": " + capture::to_string(err->kind);
            outcomes.push_back(std::move(o));
            continue;
        }
        const auto& page = std::get<PageSnapshot>(reloaded);
        const auto notice = scan::detect_first(page, suite);
        if (!notice) {
            o.error = renotice_not_found;
            outcomes.push_back(std::move(o));
            continue;
        }

        try {
            auto r = session.click_and_capture(c.text, notice->node_id);
            o.post_screenshot = std::move(r.screenshot);
            o.cookies_delta = cookie_delta(page.cookies(), r.cookies);
            o.requests_delta = std::move(r.requests);
            for (auto& req : o.requests_delta) req.phase = Phase::post_click;
            o.body_text = std::move(r.body_text);
            o.final_url = r.final_url.empty() ? page.url() : r.final_url;
            o.navigated = o.final_url != page.url();
            const auto& before = initial.screenshot();
            if (!o.post_screenshot.empty() && o.post_screenshot.width() == before.width() &&
                o.post_screenshot.height() == before.height()) {
                o.ssim_vs_initial = darkpattern::ssim(before, o.post_screenshot, ssim_params);
            }
        } catch (const capture::ClickError& e) {
            o.error = capture::to_string(e.kind());
            spdlog::debug("{}: click on '{}' failed: {}", url, c.text, e.what());
        }
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

} // namespace consentscan::interaction
