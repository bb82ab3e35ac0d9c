#include "consentscan/clickables.hpp"

#include <nlohmann/json.hpp>

#include "consentscan/text.hpp"

namespace consentscan::interaction {

using nlohmann::json;

std::string to_string(ClickableKind k)
{
    switch (k) {
    case ClickableKind::button: return "button";
    case ClickableKind::link: return "link";
    case ClickableKind::checkbox: return "checkbox";
    }
    return "button";
}

ClickableKind parse_clickable_kind(const std::string& s)
{
    if (s == "button") return ClickableKind::button;
    if (s == "link") return ClickableKind::link;
    if (s == "checkbox") return ClickableKind::checkbox;
    throw std::invalid_argument("unknown clickable kind: " + s);
}

namespace {

std::string lower_attr(const DomNode& n, const char* name)
{
    const auto* v = n.attribute(name);
    return v ? text::to_lower_utf8(text::normalize_whitespace(*v)) : std::string{};
}

bool is_toggle_input(const DomNode& n)
{
    if (n.tag != "input") return false;
    const auto type = lower_attr(n, "type");
    return type == "checkbox" || type == "radio";
}

bool is_toggle_role(const DomNode& n)
{
    const auto role = lower_attr(n, "role");
    return role == "checkbox" || role == "switch" || role == "radio";
}

std::string strip_fragment(const std::string& url)
{
    const auto hash = url.find('#');
    return hash == std::string::npos ? url : url.substr(0, hash);
}

std::string origin_of(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {};
    const auto path_start = url.find_first_of("/?#", scheme_end + 3);
    return path_start == std::string::npos ? url : url.substr(0, path_start);
}

std::string remove_dot_segments(const std::string& path)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    bool trailing_slash = false;
    while (i <= path.size()) {
        const auto j = std::min(path.find('/', i), path.size());
        const auto seg = path.substr(i, j - i);
        trailing_slash = false;
        if (seg == "..") {
            if (!out.empty()) out.pop_back();
            trailing_slash = true;
        } else if (seg == ".") {
            trailing_slash = true;
        } else if (!seg.empty()) {
            out.push_back(seg);
        }
        if (j == path.size()) {
            trailing_slash = trailing_slash || (!path.empty() && path.back() == '/');
            break;
        }
        i = j + 1;
    }
    std::string r;
    for (const auto& s : out) {
        r += '/';
        r += s;
    }
    if (r.empty() || trailing_slash) r += '/';
    return r;
}

} // namespace

std::string resolve_url(const std::string& base, const std::string& href_raw)
{
    const auto href = text::normalize_whitespace(href_raw);
    // Absolute: scheme ":" before any path/query/fragment delimiter.
    const auto colon = href.find(':');
    if (colon != std::string::npos && colon > 0 && href.find_first_of("/?#") > colon) {
        bool scheme_ok = std::isalpha(static_cast<unsigned char>(href[0])) != 0;
        for (std::size_t i = 1; i < colon && scheme_ok; ++i) {
            const char c = href[i];
            scheme_ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
        }
        if (scheme_ok) return href;
    }
    const auto scheme_end = base.find("://");
    if (href.rfind("//", 0) == 0) {
        return (scheme_end == std::string::npos ? std::string("http:") : base.substr(0, scheme_end + 1)) + href;
    }
    const auto origin = origin_of(base);
    if (href.empty()) return strip_fragment(base);
    if (href[0] == '#') return strip_fragment(base) + href;
    if (href[0] == '?') {
        const auto q = base.find_first_of("?#", origin.size());
        return (q == std::string::npos ? base : base.substr(0, q)) + href;
    }
    std::string base_path = base.substr(origin.size());
    base_path = base_path.substr(0, base_path.find_first_of("?#"));
    if (base_path.empty()) base_path = "/";
    std::string suffix;
    std::string path = href;
    if (const auto q = path.find_first_of("?#"); q != std::string::npos) {
        suffix = path.substr(q);
        path = path.substr(0, q);
    }
    if (path[0] != '/') {
        path = base_path.substr(0, base_path.rfind('/') + 1) + path;
    }
    return origin + remove_dot_segments(path) + suffix;
}

bool is_clickable(const DomNode& node)
{
    if (node.cursor_style == "pointer") return true;
    if (node.tag == "button" || node.tag == "a") return true;
    if (node.tag == "input") {
        const auto type = lower_attr(node, "type");
        return type == "button" || type == "submit" || type == "checkbox" || type == "radio";
    }
    return false;
}

ClickableClass classify_clickable(const PageSnapshot& snapshot, int node_id)
{
    const auto subtree = snapshot.subtree(node_id);
    for (int id : subtree) {
        const auto& n = snapshot.node(id);
        if (n.attribute("checked")) {
            return {ClickableKind::checkbox, true, std::nullopt};
        }
        if (n.attribute("aria-checked")) {
            return {ClickableKind::checkbox, lower_attr(n, "aria-checked") == "true", std::nullopt};
        }
        if (is_toggle_input(n) || is_toggle_role(n)) {
            return {ClickableKind::checkbox, false, std::nullopt};
        }
    }
    for (int id : subtree) {
        const auto* href = snapshot.node(id).attribute("href");
        if (!href) continue;
        const auto h = text::normalize_whitespace(*href);
        if (h.empty() || h[0] == '#' || text::to_lower_utf8(h).rfind("javascript:", 0) == 0) {
            break; // scripted or same-document: behaves like a button
        }
        const auto target = resolve_url(snapshot.url(), h);
        if (strip_fragment(target) != strip_fragment(snapshot.url())) {
            return {ClickableKind::link, std::nullopt, target};
        }
        break;
    }
    return {ClickableKind::button, std::nullopt, std::nullopt};
}

std::vector<Clickable> extract_clickables(const PageSnapshot& snapshot, int notice_node)
{
    std::vector<Clickable> out;
    std::vector<int> taken;
    for (int id : snapshot.subtree(notice_node)) {
        if (id == notice_node) continue;
        const auto& n = snapshot.node(id);
        if (!n.visible || !is_clickable(n)) continue;
        bool nested = false;
        for (int t : taken) {
            if (snapshot.is_ancestor(t, id)) {
                nested = true;
                break;
            }
        }
        if (nested) continue;
        taken.push_back(id);
        const auto cls = classify_clickable(snapshot, id);
        Clickable c;
        c.node_id = id;
        c.kind = cls.kind;
        c.checked = cls.checked;
        c.href_target = cls.href_target;
        c.text = visible_subtree_text(snapshot, id);
        c.bbox = n.bbox;
        out.push_back(std::move(c));
    }
    return out;
}

bool subtree_has_button(const PageSnapshot& snapshot, int node_id)
{
    for (int id : snapshot.subtree(node_id)) {
        const auto& n = snapshot.node(id);
        if (n.visible && is_clickable(n) && classify_clickable(snapshot, id).kind == ClickableKind::button) {
            return true;
        }
    }
    return false;
}

std::optional<int> find_clickable_by_text(const PageSnapshot& snapshot, int notice_node, const std::string& wanted)
{
    const auto target = text::normalize_whitespace(wanted);
    std::optional<int> fallback;
    for (int id : snapshot.subtree(notice_node)) {
        const auto& n = snapshot.node(id);
        if (!n.visible) continue;
        if (visible_subtree_text(snapshot, id) != target) continue;
        if (is_clickable(n)) return id;
        if (!fallback) fallback = id;
    }
    return fallback;
}

json to_json(const Clickable& c)
{
    json j = {
        {"node_id", c.node_id},
        {"kind", to_string(c.kind)},
        {"text", c.text},
        {"bbox", {c.bbox.x, c.bbox.y, c.bbox.w, c.bbox.h}},
    };
    if (c.checked) j["checked"] = *c.checked;
    if (c.href_target) j["href_target"] = *c.href_target;
    if (c.dominant_color) j["dominant_color"] = to_hex(*c.dominant_color);
    return j;
}

Clickable clickable_from_json(const json& j)
{
    Clickable c;
    c.node_id = j.at("node_id").get<int>();
    c.kind = parse_clickable_kind(j.at("kind").get<std::string>());
    c.text = j.at("text").get<std::string>();
    const auto& b = j.at("bbox");
    c.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
    if (j.contains("checked")) c.checked = j.at("checked").get<bool>();
    if (j.contains("href_target")) c.href_target = j.at("href_target").get<std::string>();
    if (j.contains("dominant_color")) c.dominant_color = parse_hex_color(j.at("dominant_color").get<std::string>());
    return c;
}

} // namespace consentscan::interaction
