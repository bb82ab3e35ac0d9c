#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "consentscan/domain.hpp"
#include "consentscan/fixtures.hpp"
#include "consentscan/text.hpp"

namespace consentscan::fixtures {

using nlohmann::json;

namespace {

const std::vector<std::pair<Behavior, std::string>>& behavior_names()
{
    static const std::vector<std::pair<Behavior, std::string>> names = {
        {Behavior::static_notice, "static"},
        {Behavior::hide_on_accept, "hide_on_accept"},
        {Behavior::hide_on_both, "hide_on_both"},
        {Behavior::dynamic_content, "dynamic_content"},
        {Behavior::shadow_dom, "shadow_dom"},
        {Behavior::no_notice, "no_notice"},
        {Behavior::foreign_language, "foreign_language"},
        {Behavior::z_overlay, "z_overlay"},
        {Behavior::link_decline, "link_decline"},
    };
    return names;
}

Rect box_from_json(const json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

ClickAction action_from_json(const json& j)
{
    static const std::vector<std::pair<std::string, ClickAction::Kind>> kinds = {
        {"hide", ClickAction::Kind::hide},         {"show", ClickAction::Kind::show},
        {"set_cookie", ClickAction::Kind::set_cookie}, {"request", ClickAction::Kind::request},
        {"navigate", ClickAction::Kind::navigate},
    };
    for (const auto& [key, kind] : kinds) {
        if (j.contains(key)) return {kind, j.at(key).get<std::string>()};
    }
    throw std::invalid_argument("unknown click action: " + j.dump());
}

Element element_from_json(const json& j)
{
    Element e;
    e.tag = j.value("tag", "div");
    e.id = j.value("id", "");
    e.cls = j.value("class", "");
    if (j.contains("attrs")) e.attrs = j.at("attrs").get<std::map<std::string, std::string>>();
    e.box = box_from_json(j.at("box"));
    if (j.contains("bg")) e.bg = parse_rgba(j.at("bg").get<std::string>());
    if (j.contains("border")) e.border = parse_hex_color(j.at("border").get<std::string>());
    if (j.contains("color")) e.color = parse_hex_color(j.at("color").get<std::string>());
    e.text = j.value("text", "");
    e.font = j.value("font", 2);
    e.center = j.value("center", false);
    e.pad = j.value("pad", 0);
    if (j.contains("z")) e.z = j.at("z").get<int>();
    e.cursor = j.value("cursor", e.tag == "button" || e.tag == "a" ? "pointer" : "auto");
    e.hidden = j.value("hidden", false);
    e.hide_if_cookie = j.value("hide_if_cookie", "");
    e.dynamic = j.value("dynamic", false);
    for (const auto& a : j.value("on_click", json::array())) e.on_click.push_back(action_from_json(a));
    for (const auto& c : j.value("shadow", json::array())) e.shadow.push_back(element_from_json(c));
    for (const auto& c : j.value("children", json::array())) e.children.push_back(element_from_json(c));
    if (e.font < 1) throw std::invalid_argument("font scale must be positive");
    return e;
}

const Element* find_element(const std::vector<Element>& list, const std::string& id)
{
    for (const auto& e : list) {
        if (e.id == id) return &e;
        if (const auto* c = find_element(e.children, id)) return c;
        if (const auto* s = find_element(e.shadow, id)) return s;
    }
    return nullptr;
}

void collect_text(const Element& e, std::string& out)
{
    if (!e.text.empty()) {
        out += ' ';
        out += e.text;
    }
    for (const auto& s : e.shadow) collect_text(s, out);
    for (const auto& c : e.children) collect_text(c, out);
}

Rect bounding(const std::vector<Element>& list)
{
    Rect r;
    bool any = false;
    for (const auto& e : list) {
        if (e.box.empty()) continue;
        if (!any) {
            r = e.box;
            any = true;
            continue;
        }
        const double l = std::min(r.x, e.box.x);
        const double t = std::min(r.y, e.box.y);
        const double rr = std::max(r.right(), e.box.right());
        const double b = std::max(r.bottom(), e.box.bottom());
        r = {l, t, rr - l, b - t};
    }
    return r;
}

} // namespace

std::string to_string(Behavior b)
{
    for (const auto& [k, name] : behavior_names()) {
        if (k == b) return name;
    }
    return "static";
}

Behavior parse_behavior(const std::string& s)
{
    for (const auto& [k, name] : behavior_names()) {
        if (name == s) return k;
    }
    throw std::invalid_argument("unknown fixture behavior: " + s);
}

Rgba parse_rgba(const std::string& s)
{
    if (s.rfind("rgba(", 0) == 0) {
        int r = 0, g = 0, b = 0;
        double a = 1;
        if (std::sscanf(s.c_str(), "rgba(%d,%d,%d,%lf)", &r, &g, &b, &a) != 4 || r < 0 || r > 255 || g < 0 ||
            g > 255 || b < 0 || b > 255 || a < 0 || a > 1) {
            throw std::invalid_argument("bad rgba colour: " + s);
        }
        return {{std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)}, a};
    }
    return {parse_hex_color(s), 1.0};
}

std::string to_css(const Rgba& c)
{
    if (c.alpha >= 1.0) return to_hex(c.rgb);
    char buf[64];
    std::snprintf(buf, sizeof buf, "rgba(%d,%d,%d,%.2f)", c.rgb.r, c.rgb.g, c.rgb.b, c.alpha);
    return buf;
}

Fixture fixture_from_json(const json& j)
{
    Fixture fx;
    try {
        fx.id = j.at("id").get<std::string>();
        fx.behavior = parse_behavior(j.at("behavior").get<std::string>());
        fx.url = j.at("url").get<std::string>();
        fx.title = j.value("title", fx.id);
        fx.lang = j.value("lang", "en");
        if (j.contains("viewport")) {
            fx.viewport = {j.at("viewport").at(0).get<int>(), j.at("viewport").at(1).get<int>()};
        }
        if (j.contains("page_bg")) fx.page_bg = parse_hex_color(j.at("page_bg").get<std::string>());
        for (const auto& e : j.at("body")) fx.body.push_back(element_from_json(e));
        fx.notice_root = j.value("notice_root", "");
        fx.has_decline = j.value("has_decline", false);
        fx.colors_differ = j.value("colors_differ", false);
        fx.perceptive_solid = j.value("perceptive_solid", false);
        fx.offset_buttons = j.value("offset_buttons", false);
        fx.tags = j.value("tags", std::vector<std::string>{});
        for (const auto& c : j.value("cookies_on_load", json::array())) {
            fx.cookies_on_load.push_back(
                {c.at("name").get<std::string>(), c.value("value", ""), c.value("domain", "")});
        }
        fx.requests_on_load = j.value("requests_on_load", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw std::invalid_argument("fixture layout: " + std::string(e.what()));
    }
    if (fx.behavior == Behavior::no_notice && !fx.notice_root.empty()) {
        throw std::invalid_argument(fx.id + ": no_notice fixture names a notice root");
    }
    if (fx.behavior != Behavior::no_notice && !find_element(fx.body, fx.notice_root)) {
        throw std::invalid_argument(fx.id + ": notice root '" + fx.notice_root + "' not found");
    }
    return fx;
}

Timestamp corpus_timestamp()
{
    return parse_timestamp("2023-06-01T12:00:00.000Z");
}

evaluation::GroundTruthRecord truth_for(const Fixture& fx)
{
    evaluation::GroundTruthRecord r;
    r.url = fx.url;
    r.language = fx.lang;
    r.annotator = "fixture-generator";
    if (fx.behavior == Behavior::no_notice) {
        r.has_notice = false;
        return r;
    }
    const auto* root = find_element(fx.body, fx.notice_root);
    r.has_notice = true;
    const Rect box = root->box.empty() ? bounding(root->shadow) : root->box;
    const Rect vp = fx.viewport.rect();
    r.notice_bbox = box.intersection(vp);
    std::string t;
    collect_text(*root, t);
    r.notice_text_hash = evaluation::notice_text_hash(t);
    r.has_decline_first_layer = fx.has_decline;
    r.colors_differ = fx.colors_differ;
    return r;
}

Corpus Corpus::load(const std::filesystem::path& dir)
{
    Corpus c;
    c.dir_ = dir;
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("fixture directory not found: " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto layout = entry.path() / "layout.json";
        if (!entry.is_directory() || !std::filesystem::exists(layout)) continue;
        std::ifstream in(layout);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error(layout.string() + ": " + e.what());
        }
        c.fixtures_.push_back(fixture_from_json(j));
    }
    std::sort(c.fixtures_.begin(), c.fixtures_.end(), [](const Fixture& a, const Fixture& b) { return a.id < b.id; });
    return c;
}

namespace {

// "F03", "f3" and "F003" name the same fixture.
std::string canonical_id(const std::string& id)
{
    std::string out = text::to_lower_utf8(id);
    auto digits = out.find_first_of("0123456789");
    if (digits == std::string::npos) return out;
    const auto nonzero = out.find_first_not_of('0', digits);
    if (nonzero != std::string::npos && out.find_first_not_of("0123456789", digits) == std::string::npos) {
        out.erase(digits, nonzero - digits);
    }
    return out;
}

} // namespace

const Fixture* Corpus::find(const std::string& id) const
{
    const auto want = canonical_id(id);
    for (const auto& f : fixtures_) {
        if (canonical_id(f.id) == want) return &f;
    }
    return nullptr;
}

const Fixture* Corpus::find_by_url(const std::string& url) const
{
    const auto host = host_of(url);
    for (const auto& f : fixtures_) {
        if (host_of(f.url) == host) return &f;
    }
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return nullptr;
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return nullptr;
    auto path = url.substr(path_start);
    path = path.substr(0, path.find_first_of("?#"));
    if (path.rfind("/f/", 0) != 0) return nullptr;
    auto id = path.substr(3);
    if (!id.empty() && id.back() == '/') id.pop_back();
    return find(id);
}

json manifest(const Corpus& corpus)
{
    json list = json::array();
    for (const auto& f : corpus.fixtures()) {
        list.push_back({
            {"id", f.id},
            {"behavior", to_string(f.behavior)},
            {"url", f.url},
            {"path", "/f/" + f.id},
            {"title", f.title},
            {"tags", f.tags},
            {"perceptive_solid", f.perceptive_solid},
            {"offset_buttons", f.offset_buttons},
            {"truth", evaluation::to_json(truth_for(f))},
        });
    }
    return {{"fixtures", std::move(list)}};
}

std::filesystem::path default_fixture_dir()
{
    if (const char* env = std::getenv("CONSENTSCAN_FIXTURES"); env && *env) {
        return env;
    }
#ifdef CONSENTSCAN_DEFAULT_FIXTURES
    return CONSENTSCAN_DEFAULT_FIXTURES;
#else
    return "fixtures";
#endif
}

} // namespace consentscan::fixtures
