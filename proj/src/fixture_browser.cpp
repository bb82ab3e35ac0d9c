#include <fstream>

#include <nlohmann/json.hpp>

#include "consentscan/clickables.hpp"
#include "consentscan/domain.hpp"
#include "consentscan/fixtures.hpp"

namespace consentscan::fixtures {

using capture::CaptureError;
using capture::CaptureErrorKind;

namespace {

std::string query_param(const std::string& url, const std::string& key)
{
    const auto q = url.find('?');
    if (q == std::string::npos) return {};
    std::string rest = url.substr(q + 1);
    rest = rest.substr(0, rest.find('#'));
    std::size_t i = 0;
    while (i <= rest.size()) {
        const auto amp = std::min(rest.find('&', i), rest.size());
        const auto pair = rest.substr(i, amp - i);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == key) return eq == std::string::npos ? "" : pair.substr(eq + 1);
        i = amp + 1;
    }
    return {};
}

std::string path_of(const std::string& url)
{
    const auto scheme_end = url.find("://");
    const auto start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (start == std::string::npos) return "/";
    auto p = url.substr(start);
    return p.substr(0, p.find_first_of("?#"));
}

PageSnapshot plain_snapshot(const std::string& url, const Viewport& vp, Timestamp at)
{
    SnapshotData d;
    d.url = url;
    d.fetched_at = at;
    d.viewport = vp;
    DomNode html;
    html.node_id = 0;
    html.tag = "html";
    html.bbox = vp.rect();
    html.visible = true;
    DomNode body = html;
    body.node_id = 1;
    body.parent_id = 0;
    body.tag = "body";
    d.nodes = {html, body};
    d.screenshot = blank_page(vp);
    return PageSnapshot(std::move(d));
}

} // namespace

void FixtureBrowser::Jar::set(CookieRecord c)
{
    for (auto& existing : cookies) {
        if (existing.name == c.name && existing.domain == c.domain && existing.path == c.path) {
            existing = std::move(c);
            return;
        }
    }
    cookies.push_back(std::move(c));
}

bool FixtureBrowser::Jar::has(const std::string& name) const
{
    for (const auto& c : cookies) {
        if (c.name == name) return true;
    }
    return false;
}

FixtureBrowser::FixtureBrowser(const Corpus& corpus) : FixtureBrowser(corpus, Options{}) {}

FixtureBrowser::FixtureBrowser(const Corpus& corpus, Options options) : corpus_(corpus), options_(options) {}

capture::CaptureResult FixtureBrowser::capture_page(const std::string& url)
{
    page_.reset();
    current_ = nullptr;
    const auto host = host_of(url);
    if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
        return CaptureError{CaptureErrorKind::scanner_failure, "unsupported url: " + url};
    }
    if (host.empty()) {
        return CaptureError{CaptureErrorKind::scanner_failure, "url without host: " + url};
    }
    if (host == "invalid" || (host.size() > 8 && host.compare(host.size() - 8, 8, ".invalid") == 0)) {
        return CaptureError{CaptureErrorKind::dns_unresolved, "net::ERR_NAME_NOT_RESOLVED"};
    }
    ++loads_;
    const auto at = corpus_timestamp() + std::chrono::seconds(loads_);
    const auto path = path_of(url);
    if (path == "/slow") {
        const auto s = query_param(url, "s");
        const long long seconds = s.empty() ? 0 : std::stoll(s);
        if (std::chrono::seconds(seconds) > options_.page_timeout) {
            return CaptureError{CaptureErrorKind::timeout, "no load event within page timeout"};
        }
        return plain_snapshot(url, Viewport{1280, 800}, at);
    }
    const auto* fx = corpus_.find_by_url(url);
    if (!fx) {
        if (path.rfind("/f/", 0) == 0) {
            return plain_snapshot(url, Viewport{1280, 800}, at); // the server's 404 page
        }
        return CaptureError{CaptureErrorKind::unreachable, "net::ERR_CONNECTION_REFUSED"};
    }

    current_ = fx;
    current_url_ = url;
    state_ = PageState{};
    state_.load_index = loads_per_fixture_[fx->id]++;
    for (const auto& c : jar_.cookies) state_.cookie_names.insert(c.name);

    auto page = render(*fx, state_, at);
    for (const auto& spec : fx->cookies_on_load) {
        jar_.set({spec.name, spec.value, spec.domain.empty() ? host : spec.domain, "/", std::nullopt,
                  Phase::initial_load});
    }
    SnapshotData data = page.snapshot.data();
    data.url = url;
    data.cookies = jar_.cookies;
    data.requests.push_back({url, "GET", Phase::initial_load, false});
    for (const auto& r : fx->requests_on_load) {
        data.requests.push_back(
            {r, "GET", Phase::initial_load, registrable_domain(host_of(r)) != registrable_domain(host)});
    }
    page_.emplace(RenderedPage{PageSnapshot(std::move(data)), std::move(page.elements)});
    return page_->snapshot;
}

void FixtureBrowser::clear_state()
{
    if (options_.honor_clear_state) {
        jar_.cookies.clear();
    }
}

capture::ClickResult FixtureBrowser::click_and_capture(const std::string& text, int notice_node)
{
    using capture::ClickError;
    if (!page_ || !current_) {
        throw ClickError(ClickError::Kind::click_failed, "no page loaded");
    }
    const auto& snap = page_->snapshot;
    if (!snap.has_node(notice_node)) {
        throw ClickError(ClickError::Kind::element_not_found, "notice node not on page");
    }
    const auto target = interaction::find_clickable_by_text(snap, notice_node, text);
    if (!target) {
        throw ClickError(ClickError::Kind::element_not_found, "no element with text '" + text + "'");
    }

    // Bubble up to the nearest element with a click handler.
    const Element* handler = nullptr;
    for (std::optional<int> id = *target; id && !handler; id = snap.parent(*id)) {
        const auto* e = page_->elements[snap.position(*id)];
        if (e && !e->on_click.empty()) handler = e;
    }

    const auto host = host_of(current_url_);
    std::vector<RequestRecord> requests;
    std::string final_url = current_url_;
    if (handler) {
        for (const auto& a : handler->on_click) {
            switch (a.kind) {
            case ClickAction::Kind::hide: state_.hidden.insert(a.target); break;
            case ClickAction::Kind::show:
                state_.shown.insert(a.target);
                state_.hidden.erase(a.target);
                break;
            case ClickAction::Kind::set_cookie: {
                const auto eq = a.target.find('=');
                jar_.set({a.target.substr(0, eq), eq == std::string::npos ? "" : a.target.substr(eq + 1), host, "/",
                          std::nullopt, Phase::post_click});
                break;
            }
            case ClickAction::Kind::request:
                requests.push_back({a.target, "GET", Phase::post_click,
                                    registrable_domain(host_of(a.target)) != registrable_domain(host)});
                break;
            case ClickAction::Kind::navigate:
                final_url = interaction::resolve_url(current_url_, a.target);
                requests.push_back({final_url, "GET", Phase::post_click,
                                    registrable_domain(host_of(final_url)) != registrable_domain(host)});
                break;
            }
        }
    }

    capture::ClickResult r;
    r.cookies = jar_.cookies;
    r.requests = std::move(requests);
    r.final_url = final_url;
    if (final_url != current_url_) {
        r.screenshot = blank_page(current_->viewport);
        page_.reset();
        current_ = nullptr;
        return r;
    }
    auto next = render(*current_, state_, snap.fetched_at());
    r.screenshot = next.snapshot.screenshot();
    r.body_text = visible_subtree_text(next.snapshot, next.snapshot.body_id());
    SnapshotData data = next.snapshot.data();
    data.url = current_url_;
    data.cookies = jar_.cookies;
    page_.emplace(RenderedPage{PageSnapshot(std::move(data)), std::move(next.elements)});
    return r;
}

void export_corpus(const Corpus& corpus, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    for (const auto& fx : corpus.fixtures()) {
        const auto dir = out_dir / fx.id;
        std::filesystem::create_directories(dir);
        FixtureBrowser browser(corpus);
        auto captured = browser.capture_page(fx.url);
        serialize_snapshot(std::get<PageSnapshot>(captured), dir / "snapshot.json");
        std::ofstream(dir / "page.html", std::ios::binary) << render_html(fx);
        std::ofstream(dir / "truth.json", std::ios::binary) << evaluation::to_json(truth_for(fx)).dump(2) << '\n';
    }
    std::ofstream(out_dir / "manifest.json", std::ios::binary) << manifest(corpus).dump(2) << '\n';
}

} // namespace consentscan::fixtures
