#include <sstream>

#include <nlohmann/json.hpp>

#include "consentscan/domain.hpp"
#include "consentscan/fixtures.hpp"

namespace consentscan::fixtures {

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string px(double v)
{
    std::ostringstream o;
    o << v << "px";
    return o.str();
}

nlohmann::json actions_json(const std::vector<ClickAction>& actions)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& act : actions) {
        switch (act.kind) {
        case ClickAction::Kind::hide: a.push_back({{"hide", act.target}}); break;
        case ClickAction::Kind::show: a.push_back({{"show", act.target}}); break;
        case ClickAction::Kind::set_cookie: a.push_back({{"set_cookie", act.target}}); break;
        case ClickAction::Kind::request: a.push_back({{"request", act.target}}); break;
        case ClickAction::Kind::navigate: a.push_back({{"navigate", act.target}}); break;
        }
    }
    return a;
}

class HtmlWriter {
public:
    std::ostringstream out;
    std::ostringstream templates;
    int shadow_count = 0;

    void element(const Element& e, const Rect& origin, std::ostringstream& sink)
    {
        std::ostringstream style;
        style << "position:absolute;box-sizing:border-box;left:" << px(e.box.x - origin.x)
              << ";top:" << px(e.box.y - origin.y) << ";width:" << px(e.box.w) << ";height:" << px(e.box.h)
              << ";color:" << to_hex(e.color) << ";font-size:" << px(7 * e.font)
              << ";line-height:" << px(10 * e.font) << ";padding:" << px(e.pad) << ";overflow:hidden";
        if (e.bg) style << ";background:" << to_css(*e.bg);
        if (e.border) style << ";border:1px solid " << to_hex(*e.border);
        if (e.z) style << ";z-index:" << *e.z;
        if (e.cursor != "auto") style << ";cursor:" << e.cursor;
        if (e.center) style << ";display:flex;align-items:center;justify-content:center;text-align:center";
        if (e.hidden) style << ";display:none";

        sink << '<' << e.tag;
        if (!e.id.empty()) sink << " id=\"" << escape(e.id) << '"';
        if (!e.cls.empty()) sink << " class=\"" << escape(e.cls) << '"';
        for (const auto& [k, v] : e.attrs) sink << ' ' << k << "=\"" << escape(v) << '"';
        sink << " style=\"" << style.str() << '"';
        if (!e.hide_if_cookie.empty()) sink << " data-hide-if-cookie=\"" << escape(e.hide_if_cookie) << '"';
        if (e.dynamic) sink << " data-dynamic=\"1\"";
        if (!e.on_click.empty()) sink << " data-actions=\"" << escape(actions_json(e.on_click).dump()) << '"';
        if (!e.shadow.empty()) {
            const int n = shadow_count++;
            sink << " data-shadow=\"shadow-" << n << '"';
            std::ostringstream inner;
            for (const auto& s : e.shadow) element(s, e.box, inner);
            templates << "<template id=\"shadow-" << n << "\">" << inner.str() << "</template>\n";
        }
        if (e.tag == "input") {
            sink << '>';
            return;
        }
        sink << '>' << escape(e.text);
        for (const auto& c : e.children) element(c, e.box, sink);
        sink << "</" << e.tag << ">\n";
    }
};

constexpr const char* behaviour_script = R"JS(
(function () {
  function hasCookie(name) {
    return document.cookie.split('; ').some(function (c) { return c.split('=')[0] === name; });
  }
  var palette = ['#1a237e', '#fbc02d', '#1b5e20', '#efebe9'];
  document.querySelectorAll('[data-hide-if-cookie]').forEach(function (el) {
    if (hasCookie(el.getAttribute('data-hide-if-cookie'))) el.style.display = 'none';
  });
  document.querySelectorAll('[data-dynamic]').forEach(function (el) {
    el.style.background = palette[Math.floor(Math.random() * palette.length)];
  });
  function wire(root) {
    root.querySelectorAll('[data-actions]').forEach(function (el) {
      el.addEventListener('click', function (ev) {
        var actions = JSON.parse(el.getAttribute('data-actions'));
        var navigates = actions.some(function (a) { return a.navigate; });
        if (!navigates) ev.preventDefault();
        ev.stopPropagation();
        actions.forEach(function (a) {
          if (a.hide) { var h = document.getElementById(a.hide); if (h) h.style.display = 'none'; }
          if (a.show) { var s = document.getElementById(a.show); if (s) s.style.display = 'block'; }
          if (a.set_cookie) document.cookie = a.set_cookie + '; path=/';
          if (a.request) fetch(a.request, { mode: 'no-cors' }).catch(function () {});
          if (a.navigate) location.href = a.navigate;
        });
      });
    });
  }
  wire(document);
  document.querySelectorAll('[data-shadow]').forEach(function (host) {
    var tpl = document.getElementById(host.getAttribute('data-shadow'));
    var root = host.attachShadow({ mode: 'closed' });
    root.appendChild(tpl.content.cloneNode(true));
    wire(root);
  });
})();
)JS";

} // namespace

std::string render_html(const Fixture& fx)
{
    HtmlWriter w;
    std::ostringstream body;
    for (const auto& e : fx.body) w.element(e, Rect{}, body);

    const auto page_host = host_of(fx.url);
    nlohmann::json onload_cookies = nlohmann::json::array();
    for (const auto& c : fx.cookies_on_load) {
        if (c.domain.empty() || domain_matches(page_host, c.domain)) onload_cookies.push_back(c.name + "=" + c.value);
    }

    std::ostringstream doc;
    doc << "<!DOCTYPE html>\n<html lang=\"" << escape(fx.lang) << "\">\n<head>\n<meta charset=\"utf-8\">\n"
        << "<title>" << escape(fx.title) << "</title>\n"
        << "<style>html,body{margin:0;padding:0;font-family:sans-serif}body{position:relative;background:"
        << to_hex(fx.page_bg) << ";width:" << fx.viewport.width_px << "px;min-height:" << fx.viewport.height_px
        << "px}</style>\n</head>\n<body>\n"
        << body.str() << w.templates.str() << "<script>\n"
        << "(" << onload_cookies.dump() << ").forEach(function (c) { document.cookie = c + '; path=/'; });\n";
    for (const auto& r : fx.requests_on_load) {
        doc << "fetch(" << nlohmann::json(r).dump() << ", { mode: 'no-cors' }).catch(function () {});\n";
    }
    doc << behaviour_script << "</script>\n</body>\n</html>\n";
    return doc.str();
}

} // namespace consentscan::fixtures
