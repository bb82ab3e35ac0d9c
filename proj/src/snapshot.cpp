#include "consentscan/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <tuple>

#include "consentscan/text.hpp"

namespace consentscan {

using nlohmann::json;

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss<milliseconds> tod{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()), long(tod.hours().count()), long(tod.minutes().count()),
                  long(tod.seconds().count()), long(tod.subseconds().count()));
    return buf;
}

Timestamp parse_timestamp(const std::string& iso)
{
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0, d = 0;
    int h = 0, mi = 0, s = 0, ms = 0;
    int consumed = 0;
    const int n = std::sscanf(iso.c_str(), "%d-%u-%uT%d:%d:%d%n", &y, &mo, &d, &h, &mi, &s, &consumed);
    if (n < 6) {
        throw SnapshotError("bad timestamp: " + iso);
    }
    std::string rest = iso.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest[0] == '.') {
        std::size_t i = 1;
        int digits = 0;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) {
            if (digits < 3) {
                ms = ms * 10 + (rest[i] - '0');
                ++digits;
            }
            ++i;
        }
        while (digits < 3) {
            ms *= 10;
            ++digits;
        }
        rest = rest.substr(i);
    }
    if (rest != "Z" && rest != "+00:00" && !rest.empty()) {
        throw SnapshotError("timestamp must be UTC: " + iso);
    }
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) {
        throw SnapshotError("bad date: " + iso);
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

std::string to_string(Phase p)
{
    return p == Phase::initial_load ? "initial_load" : "post_click";
}

Phase parse_phase(const std::string& s)
{
    if (s == "initial_load") return Phase::initial_load;
    if (s == "post_click") return Phase::post_click;
    throw SnapshotError("unknown phase: " + s);
}

PageSnapshot::PageSnapshot(SnapshotData data)
    : data_(std::move(data))
{
    if (data_.nodes.empty()) {
        throw SnapshotError("snapshot has no nodes");
    }
    if (data_.viewport.width_px <= 0 || data_.viewport.height_px <= 0) {
        throw SnapshotError("viewport dimensions must be positive");
    }
    if (data_.screenshot.width() != data_.viewport.width_px || data_.screenshot.height() != data_.viewport.height_px) {
        throw SnapshotError("screenshot dimensions differ from viewport");
    }
    const auto n = data_.nodes.size();
    index_.reserve(n);
    children_.resize(n);
    depth_.resize(n, 0);
    int bodies = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = data_.nodes[i];
        if (!index_.emplace(node.node_id, i).second) {
            throw SnapshotError("duplicate node id " + std::to_string(node.node_id));
        }
        if (node.bbox.w < 0 || node.bbox.h < 0) {
            throw SnapshotError("negative bbox on node " + std::to_string(node.node_id));
        }
        if (node.visible && node.bbox.area() == 0) {
            throw SnapshotError("zero-area node marked visible: " + std::to_string(node.node_id));
        }
        if (i == 0) {
            if (node.parent_id) {
                throw SnapshotError("root node must not have a parent");
            }
        } else {
            if (!node.parent_id) {
                throw SnapshotError("non-root node without parent: " + std::to_string(node.node_id));
            }
            auto it = index_.find(*node.parent_id);
            if (it == index_.end() || it->second >= i) {
                throw SnapshotError("parent of node " + std::to_string(node.node_id) + " does not precede it");
            }
            children_[it->second].push_back(node.node_id);
            depth_[i] = depth_[it->second] + 1;
        }
        if (node.tag == "body") {
            ++bodies;
            body_id_ = node.node_id;
        }
    }
    if (bodies != 1) {
        throw SnapshotError("snapshot must contain exactly one body, found " + std::to_string(bodies));
    }
    for (const auto& req : data_.requests) {
        if (req.url.find("://") == std::string::npos) {
            throw SnapshotError("request url is not absolute: " + req.url);
        }
    }
    for (const auto& c : data_.cookies) {
        if (c.name.empty()) {
            throw SnapshotError("cookie with empty name");
        }
    }
}

const DomNode& PageSnapshot::node(int node_id) const
{
    return data_.nodes[position(node_id)];
}

std::size_t PageSnapshot::position(int node_id) const
{
    auto it = index_.find(node_id);
    if (it == index_.end()) {
        throw SnapshotError("unknown node id " + std::to_string(node_id));
    }
    return it->second;
}

const std::vector<int>& PageSnapshot::children(int node_id) const
{
    return children_[position(node_id)];
}

int PageSnapshot::depth(int node_id) const
{
    return depth_[position(node_id)];
}

bool PageSnapshot::is_ancestor(int ancestor, int node_id) const
{
    auto cur = node(node_id).parent_id;
    while (cur) {
        if (*cur == ancestor) {
            return true;
        }
        cur = node(*cur).parent_id;
    }
    return false;
}

void PageSnapshot::collect(int node_id, std::vector<int>& out) const
{
    // Iterative pre-order walk; children lists are already in document order.
    std::vector<int> stack{node_id};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        out.push_back(id);
        const auto& kids = children_[index_.at(id)];
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            stack.push_back(*it);
        }
    }
}

std::vector<int> PageSnapshot::subtree(int node_id) const
{
    (void)position(node_id);
    std::vector<int> out;
    collect(node_id, out);
    return out;
}

bool operator==(const PageSnapshot& a, const PageSnapshot& b)
{
    const auto& x = a.data_;
    const auto& y = b.data_;
    return std::tie(x.url, x.fetched_at, x.viewport, x.nodes, x.screenshot, x.cookies, x.requests) ==
           std::tie(y.url, y.fetched_at, y.viewport, y.nodes, y.screenshot, y.cookies, y.requests);
}

namespace {

std::string joined_text(const PageSnapshot& snapshot, int node_id, bool visible_only)
{
    std::string raw;
    for (int id : snapshot.subtree(node_id)) {
        const auto& n = snapshot.node(id);
        if (visible_only && !n.visible) {
            continue;
        }
        if (!n.own_text.empty()) {
            raw += ' ';
            raw += n.own_text;
        }
    }
    return text::normalize_whitespace(raw);
}

} // namespace

std::string subtree_text(const PageSnapshot& snapshot, int node_id)
{
    return joined_text(snapshot, node_id, false);
}

std::string visible_subtree_text(const PageSnapshot& snapshot, int node_id)
{
    return joined_text(snapshot, node_id, true);
}

std::optional<int> node_at_point(const PageSnapshot& snapshot, double x, double y)
{
    const auto& vp = snapshot.viewport();
    if (x < 0 || y < 0 || x >= vp.width_px || y >= vp.height_px) {
        throw SnapshotError("point outside viewport");
    }
    std::optional<int> best;
    std::tuple<int, int, std::size_t> best_key{};
    const auto& nodes = snapshot.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!n.visible || !n.bbox.contains({x, y})) {
            continue;
        }
        const std::tuple<int, int, std::size_t> key{n.z_index, snapshot.depth(n.node_id), i};
        if (!best || key > best_key) {
            best = n.node_id;
            best_key = key;
        }
    }
    return best;
}

// ---------------------------------------------------------------- JSON

json to_json(const CookieRecord& c)
{
    return {
        {"name", c.name},
        {"value", c.value},
        {"domain", c.domain},
        {"path", c.path},
        {"expires", c.expires ? json(format_timestamp(*c.expires)) : json(nullptr)},
        {"set_at_phase", to_string(c.set_at_phase)},
    };
}

CookieRecord cookie_from_json(const json& j)
{
    CookieRecord c;
    c.name = j.at("name").get<std::string>();
    c.value = j.at("value").get<std::string>();
    c.domain = j.at("domain").get<std::string>();
    c.path = j.at("path").get<std::string>();
    if (!j.at("expires").is_null()) {
        c.expires = parse_timestamp(j.at("expires").get<std::string>());
    }
    c.set_at_phase = parse_phase(j.at("set_at_phase").get<std::string>());
    return c;
}

json to_json(const RequestRecord& r)
{
    return {
        {"url", r.url},
        {"method", r.method},
        {"phase", to_string(r.phase)},
        {"is_third_party", r.is_third_party},
    };
}

RequestRecord request_from_json(const json& j)
{
    RequestRecord r;
    r.url = j.at("url").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.phase = parse_phase(j.at("phase").get<std::string>());
    r.is_third_party = j.at("is_third_party").get<bool>();
    return r;
}

json snapshot_to_json(const PageSnapshot& snapshot, const std::string& screenshot_ref)
{
    json nodes = json::array();
    for (const auto& n : snapshot.nodes()) {
        json attrs = json::object();
        for (const auto& [k, v] : n.attributes) {
            attrs[k] = v;
        }
        nodes.push_back({
            {"node_id", n.node_id},
            {"parent_id", n.parent_id ? json(*n.parent_id) : json(nullptr)},
            {"tag", n.tag},
            {"attributes", std::move(attrs)},
            {"own_text", n.own_text},
            {"bbox", {n.bbox.x, n.bbox.y, n.bbox.w, n.bbox.h}},
            {"z_index", n.z_index},
            {"visible", n.visible},
            {"cursor_style", n.cursor_style},
        });
    }
    json cookies = json::array();
    for (const auto& c : snapshot.cookies()) {
        cookies.push_back(to_json(c));
    }
    json requests = json::array();
    for (const auto& r : snapshot.requests()) {
        requests.push_back(to_json(r));
    }
    return {
        {"schema_version", snapshot_schema_version},
        {"url", snapshot.url()},
        {"fetched_at", format_timestamp(snapshot.fetched_at())},
        {"viewport", {{"width_px", snapshot.viewport().width_px}, {"height_px", snapshot.viewport().height_px}}},
        {"screenshot", screenshot_ref},
        {"nodes", std::move(nodes)},
        {"cookies", std::move(cookies)},
        {"requests", std::move(requests)},
    };
}

PageSnapshot snapshot_from_json(const json& doc, RgbImage screenshot)
{
    try {
        if (!doc.contains("schema_version") || doc.at("schema_version").get<int>() != snapshot_schema_version) {
            throw SnapshotError("schema_mismatch: expected schema_version " + std::to_string(snapshot_schema_version));
        }
        SnapshotData d;
        d.url = doc.at("url").get<std::string>();
        d.fetched_at = parse_timestamp(doc.at("fetched_at").get<std::string>());
        d.viewport.width_px = doc.at("viewport").at("width_px").get<int>();
        d.viewport.height_px = doc.at("viewport").at("height_px").get<int>();
        for (const auto& jn : doc.at("nodes")) {
            DomNode n;
            n.node_id = jn.at("node_id").get<int>();
            if (!jn.at("parent_id").is_null()) {
                n.parent_id = jn.at("parent_id").get<int>();
            }
            n.tag = jn.at("tag").get<std::string>();
            for (const auto& [k, v] : jn.at("attributes").items()) {
                n.attributes[k] = v.get<std::string>();
            }
            n.own_text = jn.at("own_text").get<std::string>();
            const auto& b = jn.at("bbox");
            n.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
            n.z_index = jn.at("z_index").get<int>();
            n.visible = jn.at("visible").get<bool>();
            n.cursor_style = jn.at("cursor_style").get<std::string>();
            d.nodes.push_back(std::move(n));
        }
        for (const auto& jc : doc.value("cookies", json::array())) {
            d.cookies.push_back(cookie_from_json(jc));
        }
        for (const auto& jr : doc.value("requests", json::array())) {
            d.requests.push_back(request_from_json(jr));
        }
        d.screenshot = std::move(screenshot);
        return PageSnapshot(std::move(d));
    } catch (const json::exception& e) {
        throw SnapshotError(std::string("schema_mismatch: ") + e.what());
    }
}

std::filesystem::path serialize_snapshot(const PageSnapshot& snapshot, const std::filesystem::path& json_path)
{
    auto sidecar = json_path;
    sidecar.replace_extension(".png");
    write_png(sidecar, snapshot.screenshot());
    std::ofstream out(json_path, std::ios::trunc);
    if (!out) {
        throw SnapshotError("cannot write " + json_path.string());
    }
    out << snapshot_to_json(snapshot, sidecar.filename().string()).dump(1) << '\n';
    if (!out) {
        throw SnapshotError("short write to " + json_path.string());
    }
    return sidecar;
}

PageSnapshot deserialize_snapshot(const std::filesystem::path& json_path)
{
    std::ifstream in(json_path);
    if (!in) {
        throw SnapshotError("cannot open " + json_path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SnapshotError(std::string("schema_mismatch: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("screenshot")) {
        throw SnapshotError("schema_mismatch: missing screenshot reference");
    }
    const auto sidecar = json_path.parent_path() / doc.at("screenshot").get<std::string>();
    return snapshot_from_json(doc, read_png(sidecar));
}

} // namespace consentscan
