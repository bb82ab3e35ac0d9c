#include "consentscan/chrome.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <boost/process.hpp>
#include <nlohmann/json.hpp>

#include "consentscan/cdp.hpp"
#include "consentscan/clickables.hpp"
#include "consentscan/domain.hpp"
#include "consentscan/text.hpp"

namespace consentscan::capture {

namespace bp = boost::process;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

CaptureErrorKind classify_net_error(const std::string& error_text)
{
    static const char* const dns[] = {"ERR_NAME_NOT_RESOLVED", "ERR_NAME_RESOLUTION_FAILED"};
    static const char* const unreachable[] = {
        "ERR_CONNECTION_REFUSED",   "ERR_CONNECTION_RESET",   "ERR_CONNECTION_CLOSED",
        "ERR_CONNECTION_FAILED",    "ERR_CONNECTION_TIMED_OUT", "ERR_ADDRESS_UNREACHABLE",
        "ERR_INTERNET_DISCONNECTED", "ERR_EMPTY_RESPONSE",    "ERR_SSL_PROTOCOL_ERROR",
        "ERR_CERT_",                "ERR_NETWORK_CHANGED",    "ERR_ADDRESS_INVALID",
    };
    for (const char* code : dns) {
        if (error_text.find(code) != std::string::npos) return CaptureErrorKind::dns_unresolved;
    }
    for (const char* code : unreachable) {
        if (error_text.find(code) != std::string::npos) return CaptureErrorKind::unreachable;
    }
    if (error_text.find("ERR_TIMED_OUT") != std::string::npos) return CaptureErrorKind::timeout;
    return CaptureErrorKind::scanner_failure;
}

std::optional<std::pair<int, std::string>> parse_devtools_active_port(const std::string& contents)
{
    std::istringstream in(contents);
    std::string port_line, path;
    if (!std::getline(in, port_line) || !std::getline(in, path)) return std::nullopt;
    try {
        std::size_t used = 0;
        const int port = std::stoi(port_line, &used);
        if (used != port_line.size() || port <= 0 || port > 65535 || path.empty() || path[0] != '/') {
            return std::nullopt;
        }
        return std::make_pair(port, path);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

const std::string& dom_extraction_script()
{
    static const std::string script = R"JS((() => {
  const skip = new Set(['HEAD', 'SCRIPT', 'STYLE', 'NOSCRIPT', 'TEMPLATE', 'META', 'LINK', 'TITLE', 'BASE']);
  const sx = window.scrollX, sy = window.scrollY;
  const nodes = [], elements = [];
  const visit = (el, parent, parentZ, parentDisplay, hidden) => {
    if (skip.has(el.tagName)) return;
    const cs = getComputedStyle(el);
    const r = el.getBoundingClientRect();
    const stacking = cs.position !== 'static' || /flex|grid/.test(parentDisplay);
    const z = cs.zIndex !== 'auto' && stacking ? (parseInt(cs.zIndex, 10) || 0) : parentZ;
    const gone = hidden || cs.display === 'none';
    let own = '';
    for (const c of el.childNodes) if (c.nodeType === Node.TEXT_NODE) own += ' ' + c.nodeValue;
    const tag = el.tagName.toLowerCase();
    if (tag === 'input' && /^(button|submit|reset)$/i.test(el.type)) own += ' ' + el.value;
    const attrs = {};
    for (const a of el.attributes) attrs[a.name] = a.value;
    if (tag === 'input' && (el.type === 'checkbox' || el.type === 'radio')) {
      if (el.checked) attrs['checked'] = attrs['checked'] || ''; else delete attrs['checked'];
    }
    const id = nodes.length;
    nodes.push({
      id, parent, tag, attrs, text: own,
      box: [r.left + sx, r.top + sy, r.width, r.height], z,
      visible: !gone && cs.visibility !== 'hidden' && parseFloat(cs.opacity) > 0 && r.width > 0 && r.height > 0,
      cursor: cs.cursor
    });
    elements.push(el);
    if (tag === 'iframe') return;
    for (const c of el.children) visit(c, id, z, cs.display, gone);
  };
  visit(document.documentElement, null, 0, 'block', false);
  window.__consentscanNodes = elements;
  return JSON.stringify({url: location.href, nodes});
})())JS";
    return script;
}

std::vector<DomNode> nodes_from_extraction(const json& doc)
{
    std::vector<DomNode> nodes;
    bool has_body = false;
    try {
        for (const auto& n : doc.at("nodes")) {
            DomNode d;
            d.node_id = n.at("id").get<int>();
            if (!n.at("parent").is_null()) d.parent_id = n.at("parent").get<int>();
            d.tag = text::to_lower_utf8(n.at("tag").get<std::string>());
            for (const auto& [k, v] : n.at("attrs").items()) d.attributes[k] = v.get<std::string>();
            d.own_text = text::normalize_whitespace(n.at("text").get<std::string>());
            const auto& b = n.at("box");
            d.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), std::max(0.0, b.at(2).get<double>()),
                      std::max(0.0, b.at(3).get<double>())};
            d.z_index = n.at("z").get<int>();
            d.visible = n.at("visible").get<bool>() && d.bbox.area() > 0;
            d.cursor_style = n.value("cursor", "auto");
            has_body = has_body || d.tag == "body";
            nodes.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw SnapshotError(std::string("malformed DOM extraction: ") + e.what());
    }
    if (nodes.empty() || nodes.front().tag != "html" || !has_body) {
        throw SnapshotError("document has no html root or body");
    }
    return nodes;
}

std::filesystem::path find_browser(const std::string& explicit_path)
{
    if (!explicit_path.empty()) return explicit_path;
    if (const char* env = std::getenv("CONSENTSCAN_BROWSER"); env && *env) return env;
    for (const char* name : {"google-chrome", "google-chrome-stable", "chromium", "chromium-browser", "chrome",
                             "headless_shell"}) {
        auto p = bp::search_path(name);
        if (!p.empty()) return p.string();
    }
    return {};
}

struct ChromeSession::Impl {
    CaptureConfig config;
    std::filesystem::path profile_dir;
    bp::child process;
    cdp::Connection conn;
    std::string target_id;
    std::string session_id;

    Phase phase = Phase::initial_load;
    bool loaded = false;
    bool detached = false;
    std::vector<std::pair<std::string, std::string>> requests; // (url, method)
    std::optional<PageSnapshot> last;
    std::string last_origin;

    ~Impl()
    {
        conn.close();
        if (process.valid() && process.running()) {
            std::error_code ec;
            process.terminate(ec);
            process.wait(ec);
        }
        if (!profile_dir.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(profile_dir, ec);
        }
    }

    json page(const std::string& method, const json& params = json::object(),
              std::chrono::milliseconds timeout = std::chrono::seconds(30))
    {
        return conn.call(method, params, session_id, timeout);
    }

    json evaluate(const std::string& expression, std::chrono::milliseconds timeout = std::chrono::seconds(30))
    {
        const auto r = page("Runtime.evaluate", {{"expression", expression}, {"returnByValue", true}}, timeout);
        if (r.contains("exceptionDetails")) {
            throw cdp::CdpError("script failed: " + r.at("exceptionDetails").value("text", "exception"));
        }
        return r.at("result").value("value", json(nullptr));
    }

    void launch(const std::filesystem::path& browser)
    {
        std::random_device rd;
        profile_dir = std::filesystem::temp_directory_path() / ("consentscan-profile-" + std::to_string(rd()));
        std::filesystem::create_directories(profile_dir);
        std::vector<std::string> args = {
            "--headless=new",
            "--remote-debugging-port=0",
            "--user-data-dir=" + profile_dir.string(),
            "--no-first-run",
            "--no-default-browser-check",
            "--disable-gpu",
            "--disable-extensions",
            "--disable-background-networking",
            "--disable-sync",
            "--mute-audio",
            "--hide-scrollbars",
            "--window-size=" + std::to_string(config.viewport.width_px) + "," +
                std::to_string(config.viewport.height_px),
            "about:blank",
        };
        if (geteuid() == 0) args.insert(args.begin(), "--no-sandbox");
        process = bp::child(browser.string(), bp::args(args), bp::std_out > bp::null, bp::std_err > bp::null,
                            bp::std_in < bp::null);

        const auto port_file = profile_dir / "DevToolsActivePort";
        const auto deadline = Clock::now() + std::chrono::seconds(30);
        std::optional<std::pair<int, std::string>> endpoint;
        while (!endpoint) {
            if (!process.running()) throw std::runtime_error("browser exited during startup: " + browser.string());
            if (Clock::now() > deadline) throw std::runtime_error("browser did not open a DevTools port");
            std::ifstream in(port_file);
            if (in) {
                std::stringstream ss;
                ss << in.rdbuf();
                endpoint = parse_devtools_active_port(ss.str());
            }
            if (!endpoint) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        conn.connect("127.0.0.1", endpoint->first, endpoint->second);
        conn.on_event([this](const std::string& method, const json& params, const std::string& sid) {
            on_event(method, params, sid);
        });

        target_id = conn.call("Target.createTarget", {{"url", "about:blank"}}).at("targetId").get<std::string>();
        session_id = conn.call("Target.attachToTarget", {{"targetId", target_id}, {"flatten", true}})
                         .at("sessionId")
                         .get<std::string>();
        page("Page.enable");
        page("Network.enable");
        page("Runtime.enable");
        page("Emulation.setDeviceMetricsOverride", {{"width", config.viewport.width_px},
                                                    {"height", config.viewport.height_px},
                                                    {"deviceScaleFactor", 1},
                                                    {"mobile", false}});
        page("Network.setUserAgentOverride", {{"userAgent", config.user_agent}});
    }

    void on_event(const std::string& method, const json& params, const std::string& sid)
    {
        if (method == "Target.detachedFromTarget" && params.value("sessionId", "") == session_id) {
            detached = true;
            return;
        }
        if (sid != session_id) return;
        if (method == "Page.loadEventFired") {
            loaded = true;
        } else if (method == "Network.requestWillBeSent") {
            const auto& req = params.at("request");
            auto url = req.value("url", "");
            if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) {
                requests.emplace_back(std::move(url), req.value("method", "GET"));
            }
        }
    }

    void settle()
    {
        conn.pump_until(Clock::now() + config.settle_wait);
    }

    std::vector<CookieRecord> cookies(Phase tag)
    {
        std::vector<CookieRecord> out;
        for (const auto& c : page("Network.getAllCookies").at("cookies")) {
            CookieRecord r;
            r.name = c.value("name", "");
            if (r.name.empty()) continue;
            r.value = c.value("value", "");
            r.domain = c.value("domain", "");
            r.path = c.value("path", "/");
            const double expires = c.value("expires", -1.0);
            if (!c.value("session", false) && expires > 0) {
                r.expires = Timestamp(std::chrono::milliseconds(static_cast<long long>(expires * 1000)));
            }
            r.set_at_phase = tag;
            out.push_back(std::move(r));
        }
        return out;
    }

    std::vector<RequestRecord> take_requests(const std::string& page_url, Phase tag)
    {
        const auto site = registrable_domain(host_of(page_url));
        std::vector<RequestRecord> out;
        for (auto& [url, method] : requests) {
            out.push_back({url, method, tag, registrable_domain(host_of(url)) != site});
        }
        requests.clear();
        return out;
    }

    RgbImage screenshot()
    {
        const auto r = page("Page.captureScreenshot", {{"format", "png"}, {"fromSurface", true}});
        const auto bytes = text::base64_decode(r.at("data").get<std::string>());
        auto image = decode_png(bytes);
        if (image.width() != config.viewport.width_px || image.height() != config.viewport.height_px) {
            throw cdp::CdpError("screenshot size " + std::to_string(image.width()) + "x" +
                                std::to_string(image.height()) + " does not match the viewport");
        }
        return image;
    }
};

ChromeSession::ChromeSession(const std::filesystem::path& browser, const CaptureConfig& config)
    : impl_(std::make_unique<Impl>())
{
    config.validate();
    impl_->config = config;
    try {
        impl_->launch(browser);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("cannot start browser: ") + e.what());
    }
}

ChromeSession::~ChromeSession() = default;

CaptureResult ChromeSession::capture_page(const std::string& url)
{
    auto& s = *impl_;
    if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
        return CaptureError{CaptureErrorKind::scanner_failure, "unsupported url: " + url};
    }
    try {
        s.last.reset();
        s.requests.clear();
        s.phase = Phase::initial_load;
        s.loaded = false;
        const auto deadline = Clock::now() + s.config.page_timeout;
        const auto remaining = [&] {
            return std::max(std::chrono::milliseconds(1),
                            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()));
        };

        json nav;
        try {
            nav = s.page("Page.navigate", {{"url", url}}, remaining());
        } catch (const cdp::CdpTimeout&) {
            s.page("Page.stopLoading");
            return CaptureError{CaptureErrorKind::timeout, "navigation did not commit within the page timeout"};
        }
        if (const auto err = nav.value("errorText", ""); !err.empty()) {
            return CaptureError{classify_net_error(err), err};
        }
        if (!s.conn.pump_until(deadline, [&] { return s.loaded || s.detached; })) {
            s.page("Page.stopLoading");
            return CaptureError{CaptureErrorKind::timeout, "no load event within the page timeout"};
        }
        if (s.detached) return CaptureError{CaptureErrorKind::scanner_failure, "page target detached"};

        if (s.config.suppress_media) {
            s.evaluate("(() => { const st = document.createElement('style');"
                       " st.textContent = 'img,picture,video,canvas,svg{visibility:hidden !important}';"
                       " (document.head || document.documentElement).appendChild(st); })()");
        }
        s.settle();
        s.evaluate("window.scrollTo(0, 0)");

        const auto doc = json::parse(s.evaluate(dom_extraction_script()).get<std::string>());
        SnapshotData data;
        data.url = doc.value("url", url);
        data.fetched_at = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
        data.viewport = s.config.viewport;
        data.nodes = nodes_from_extraction(doc);
        data.screenshot = s.screenshot();
        data.cookies = s.cookies(Phase::initial_load);
        data.requests = s.take_requests(data.url, Phase::initial_load);
        const auto scheme_end = data.url.find("://");
        s.last_origin = data.url.substr(0, data.url.find('/', scheme_end + 3));
        s.last.emplace(std::move(data));
        return *s.last;
    } catch (const std::exception& e) {
        return CaptureError{CaptureErrorKind::scanner_failure, e.what()};
    }
}

void ChromeSession::clear_state()
{
    auto& s = *impl_;
    s.page("Page.navigate", {{"url", "about:blank"}});
    s.page("Network.clearBrowserCookies");
    s.page("Network.clearBrowserCache");
    if (!s.last_origin.empty()) {
        s.page("Storage.clearDataForOrigin", {{"origin", s.last_origin}, {"storageTypes", "all"}});
    }
    s.last.reset();
}

ClickResult ChromeSession::click_and_capture(const std::string& text, int notice_node)
{
    auto& s = *impl_;
    if (!s.last) throw ClickError(ClickError::Kind::click_failed, "no page loaded");
    if (!s.last->has_node(notice_node)) {
        throw ClickError(ClickError::Kind::element_not_found, "notice node not on page");
    }
    const auto target = interaction::find_clickable_by_text(*s.last, notice_node, text);
    if (!target) throw ClickError(ClickError::Kind::element_not_found, "no element with text '" + text + "'");

    try {
        const auto point = s.evaluate(
            "(() => { const el = (window.__consentscanNodes || [])[" + std::to_string(*target) +
            "]; if (!el || !el.isConnected) return null;"
            " let r = el.getBoundingClientRect();"
            " if (r.bottom < 0 || r.top > innerHeight || r.right < 0 || r.left > innerWidth) {"
            "   el.scrollIntoView({block: 'center', inline: 'center'}); r = el.getBoundingClientRect(); }"
            " return [r.left + r.width / 2, r.top + r.height / 2]; })()");
        if (!point.is_array()) throw ClickError(ClickError::Kind::click_failed, "element left the page");

        const auto before = s.cookies(Phase::initial_load);
        s.requests.clear();
        s.phase = Phase::post_click;
        const double x = point.at(0).get<double>(), y = point.at(1).get<double>();
        s.page("Input.dispatchMouseEvent", {{"type", "mouseMoved"}, {"x", x}, {"y", y}});
        for (const char* type : {"mousePressed", "mouseReleased"}) {
            s.page("Input.dispatchMouseEvent",
                   {{"type", type}, {"x", x}, {"y", y}, {"button", "left"}, {"clickCount", 1}});
        }
        s.settle();

        ClickResult r;
        r.screenshot = s.screenshot();
        for (auto c : s.cookies(Phase::post_click)) {
            const bool existed = std::any_of(before.begin(), before.end(), [&](const CookieRecord& b) {
                return b.name == c.name && b.domain == c.domain && b.path == c.path && b.value == c.value;
            });
            if (existed) c.set_at_phase = Phase::initial_load;
            r.cookies.push_back(std::move(c));
        }
        json page_state;
        try {
            page_state = s.evaluate("[location.href, document.body ? document.body.innerText : '']");
        } catch (const cdp::CdpError&) {
            s.settle(); // the execution context was replaced by a navigation
            page_state = s.evaluate("[location.href, document.body ? document.body.innerText : '']");
        }
        r.final_url = page_state.at(0).get<std::string>();
        r.body_text = text::normalize_whitespace(page_state.at(1).get<std::string>());
        r.requests = s.take_requests(s.last->url(), Phase::post_click);
        return r;
    } catch (const ClickError&) {
        throw;
    } catch (const std::exception& e) {
        throw ClickError(ClickError::Kind::click_failed, e.what());
    }
}

ChromeBrowserFactory::ChromeBrowserFactory(std::filesystem::path browser, CaptureConfig config)
    : browser_(std::move(browser)), config_(std::move(config))
{
    config_.validate();
}

std::unique_ptr<BrowserSession> ChromeBrowserFactory::create()
{
    return std::make_unique<ChromeSession>(browser_, config_);
}

} // namespace consentscan::capture
