#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/browser.hpp"
#include "consentscan/evaluation.hpp"
#include "consentscan/image.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::fixtures {

enum class Behavior {
    static_notice,
    hide_on_accept,
    hide_on_both,
    dynamic_content,
    shadow_dom,
    no_notice,
    foreign_language,
    z_overlay,
    link_decline
};

std::string to_string(Behavior b);
Behavior parse_behavior(const std::string& s);

struct Rgba {
    Rgb rgb;
    double alpha = 1.0;

    friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// "#rrggbb", "#rgb" or "rgba(r,g,b,a)".
Rgba parse_rgba(const std::string& s);
std::string to_css(const Rgba& c);

struct ClickAction {
    enum class Kind { hide, show, set_cookie, request, navigate };
    Kind kind = Kind::hide;
    std::string target; // element id, "name=value", or URL
};

struct Element {
    std::string tag = "div";
    std::string id;
    std::string cls;
    std::map<std::string, std::string> attrs;
    Rect box;
    std::optional<Rgba> bg;
    std::optional<Rgb> border;
    Rgb color{0x22, 0x22, 0x22};
    std::string text;
    int font = 2;
    bool center = false;
    int pad = 0;
    std::optional<int> z;
    std::string cursor = "auto";
    bool hidden = false;
    std::string hide_if_cookie;
    bool dynamic = false;
    std::vector<ClickAction> on_click;
    /// Painted but absent from the captured DOM (closed shadow root).
    std::vector<Element> shadow;
    std::vector<Element> children;
};

struct CookieSpec {
    std::string name;
    std::string value;
    std::string domain; // empty: the page host
};

struct Fixture {
    std::string id;
    Behavior behavior = Behavior::static_notice;
    std::string url; // canonical URL used in snapshots and ground truth
    std::string title;
    std::string lang = "en";
    Viewport viewport{1280, 800};
    Rgb page_bg{0xff, 0xff, 0xff};
    std::vector<Element> body;

    std::string notice_root; // element id, empty for no_notice
    bool has_decline = false;
    bool colors_differ = false;
    /// Notice drawn on one solid background colour (geometric accuracy checks).
    bool perceptive_solid = false;
    /// Notice whose buttons sit outside the keyword's own panel.
    bool offset_buttons = false;
    std::vector<std::string> tags;

    std::vector<CookieSpec> cookies_on_load;
    std::vector<std::string> requests_on_load;
};

Fixture fixture_from_json(const nlohmann::json& j);

/// Mutable page state a simulated browser keeps between renders.
struct PageState {
    std::set<std::string> hidden; // ids hidden by clicks
    std::set<std::string> shown;  // initially hidden ids revealed by clicks
    std::set<std::string> cookie_names;
    int load_index = 0;
};

struct RenderedPage {
    PageSnapshot snapshot;
    /// Node id -> element (nullptr for html/body).
    std::vector<const Element*> elements;
};

/// Lays out the fixture DOM, paints the screenshot and builds the snapshot.
RenderedPage render(const Fixture& fx, const PageState& state, Timestamp fetched_at);

/// Screenshot of a plain page (used after navigating away).
RgbImage blank_page(const Viewport& vp, Rgb color = {0xff, 0xff, 0xff});

/// Fixed timestamp stamped on committed snapshots.
Timestamp corpus_timestamp();

evaluation::GroundTruthRecord truth_for(const Fixture& fx);

/// Standalone HTML document reproducing the layout, with inline scripts for click behaviour.
std::string render_html(const Fixture& fx);

class Corpus {
public:
    /// Loads every `<dir>/<id>/layout.json`, sorted by id.
    static Corpus load(const std::filesystem::path& dir);

    const std::vector<Fixture>& fixtures() const { return fixtures_; }
    const Fixture* find(const std::string& id) const;
    /// Resolves /f/<id> paths and canonical fixture hosts.
    const Fixture* find_by_url(const std::string& url) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<Fixture> fixtures_;
};

nlohmann::json manifest(const Corpus& corpus);

/// Writes page.html, truth.json, snapshot.json and snapshot.png per fixture plus manifest.json.
void export_corpus(const Corpus& corpus, const std::filesystem::path& out_dir);

/// Repository fixture directory (compile-time default, overridable by CONSENTSCAN_FIXTURES).
std::filesystem::path default_fixture_dir();

/// Offline stand-in for a real browser, driven by fixture layouts.
///
/// Understands the same URLs as the fixture server: `.invalid` hosts fail DNS,
/// `/slow?s=N` times out when N exceeds the page timeout.
class FixtureBrowser final : public capture::BrowserSession {
public:
    struct Options {
        bool honor_clear_state = true;
        std::chrono::milliseconds page_timeout{60000};
    };

    explicit FixtureBrowser(const Corpus& corpus);
    FixtureBrowser(const Corpus& corpus, Options options);

    capture::CaptureResult capture_page(const std::string& url) override;
    void clear_state() override;
    capture::ClickResult click_and_capture(const std::string& text, int notice_node) override;

    int loads() const { return loads_; }

private:
    struct Jar {
        std::vector<CookieRecord> cookies;
        void set(CookieRecord c);
        bool has(const std::string& name) const;
    };

    const Corpus& corpus_;
    Options options_;
    Jar jar_;
    int loads_ = 0;
    std::map<std::string, int> loads_per_fixture_;
    const Fixture* current_ = nullptr;
    std::string current_url_;
    PageState state_;
    std::optional<RenderedPage> page_;
};

class FixtureBrowserFactory final : public capture::BrowserFactory {
public:
    explicit FixtureBrowserFactory(const Corpus& corpus, FixtureBrowser::Options options = {})
        : corpus_(corpus), options_(options)
    {
    }
    std::unique_ptr<capture::BrowserSession> create() override
    {
        return std::make_unique<FixtureBrowser>(corpus_, options_);
    }

private:
    const Corpus& corpus_;
    FixtureBrowser::Options options_;
};

} // namespace consentscan::fixtures
