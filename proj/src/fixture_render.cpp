#include <algorithm>
#include <cmath>

#include "consentscan/fixtures.hpp"
#include "consentscan/text.hpp"

namespace consentscan::fixtures {

namespace {

constexpr int glyph_w = 5;
constexpr int glyph_h = 7;
constexpr int advance = 6;
constexpr int line_height = 10;

// Palette cycled per page load by elements marked dynamic.
const Rgb dynamic_palette[] = {{0x1a, 0x23, 0x7e}, {0xfb, 0xc0, 0x2d}, {0x1b, 0x5e, 0x20}, {0xef, 0xeb, 0xe9}};

std::vector<char32_t> decode_utf8(const std::string& s)
{
    std::vector<char32_t> out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        int len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 1;
        char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
        for (int k = 1; k < len && i + k < s.size(); ++k) {
            cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

/// Deterministic 5x7 pseudo-glyph per code point (FNV-1a scrambled).
std::uint64_t glyph_bits(char32_t cp)
{
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < 4; ++i) {
        h ^= (cp >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
    }
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 32;
    std::uint64_t bits = h & ((1ull << (glyph_w * glyph_h)) - 1);
    return bits == 0 ? 0x4210842ull : bits;
}

Rgb blend(Rgb under, const Rgba& over)
{
    if (over.alpha >= 1.0) return over.rgb;
    const auto mix = [a = over.alpha](std::uint8_t top, std::uint8_t bottom) {
        return static_cast<std::uint8_t>(std::lround(a * top + (1.0 - a) * bottom));
    };
    return {mix(over.rgb.r, under.r), mix(over.rgb.g, under.g), mix(over.rgb.b, under.b)};
}

PixelRect to_pixels(const Rect& r)
{
    const int x0 = static_cast<int>(std::lround(r.x));
    const int y0 = static_cast<int>(std::lround(r.y));
    const int x1 = static_cast<int>(std::lround(r.right()));
    const int y1 = static_cast<int>(std::lround(r.bottom()));
    return {x0, y0, x1 - x0, y1 - y0};
}

void fill_blended(RgbImage& img, const PixelRect& area, const Rgba& c)
{
    const auto r = img.clip(area);
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            img.set(x, y, blend(img.at(x, y), c));
        }
    }
}

std::vector<std::vector<char32_t>> wrap_lines(const std::string& text, int max_chars)
{
    std::vector<std::vector<char32_t>> lines;
    std::vector<char32_t> line;
    const auto words = [&] {
        std::vector<std::vector<char32_t>> ws;
        std::vector<char32_t> cur;
        for (char32_t cp : decode_utf8(text::normalize_whitespace(text))) {
            if (cp == U' ') {
                if (!cur.empty()) ws.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(cp);
            }
        }
        if (!cur.empty()) ws.push_back(std::move(cur));
        return ws;
    }();
    for (const auto& w : words) {
        const std::size_t need = line.empty() ? w.size() : line.size() + 1 + w.size();
        if (!line.empty() && static_cast<int>(need) > max_chars) {
            lines.push_back(std::move(line));
            line.clear();
        }
        if (!line.empty()) line.push_back(U' ');
        line.insert(line.end(), w.begin(), w.end());
    }
    if (!line.empty()) lines.push_back(std::move(line));
    return lines;
}

void paint_text(RgbImage& img, const Element& e)
{
    if (e.text.empty()) return;
    const int f = e.font;
    const auto box = to_pixels(e.box);
    const int inner_w = box.w - 2 * e.pad;
    const int max_chars = std::max(1, inner_w / (advance * f));
    const auto lines = wrap_lines(e.text, max_chars);
    const int block_h = static_cast<int>(lines.size()) * line_height * f - (line_height - glyph_h) * f;
    int y = box.y + e.pad;
    if (e.center) y = box.y + (box.h - block_h) / 2;
    const PixelRect clip_box = img.clip(box);
    for (const auto& line : lines) {
        const int line_w = static_cast<int>(line.size()) * advance * f - (advance - glyph_w) * f;
        int x = box.x + e.pad;
        if (e.center) x = box.x + (box.w - line_w) / 2;
        for (char32_t cp : line) {
            if (cp != U' ') {
                const auto bits = glyph_bits(cp);
                for (int gy = 0; gy < glyph_h; ++gy) {
                    for (int gx = 0; gx < glyph_w; ++gx) {
                        if (!((bits >> (gy * glyph_w + gx)) & 1)) continue;
                        for (int py = y + gy * f; py < y + (gy + 1) * f; ++py) {
                            for (int px = x + gx * f; px < x + (gx + 1) * f; ++px) {
                                if (clip_box.contains(px, py)) img.set(px, py, e.color);
                            }
                        }
                    }
                }
            }
            x += advance * f;
        }
        y += line_height * f;
    }
}

struct PaintItem {
    const Element* element;
    int z;
    std::size_t order;
};

struct Builder {
    const Fixture& fx;
    const PageState& state;
    std::vector<DomNode> nodes;
    std::vector<const Element*> elements;
    std::vector<PaintItem> paint;
    std::size_t paint_order = 0;
    double content_bottom = 0;

    bool is_hidden(const Element& e) const
    {
        if (!e.id.empty() && state.hidden.contains(e.id)) return true;
        if (!e.hide_if_cookie.empty() && state.cookie_names.contains(e.hide_if_cookie)) return true;
        return e.hidden && !(!e.id.empty() && state.shown.contains(e.id));
    }

    // Media elements are laid out but never painted, as with media suppression in live capture.
    static bool is_media(const Element& e)
    {
        return e.tag == "img" || e.tag == "picture" || e.tag == "video" || e.tag == "canvas" || e.tag == "svg";
    }

    void add_shadow(const Element& e, int z)
    {
        const int ez = e.z.value_or(z);
        if (!is_media(e)) paint.push_back({&e, ez, paint_order++});
        for (const auto& s : e.shadow) add_shadow(s, ez);
        for (const auto& c : e.children) add_shadow(c, ez);
    }

    void add(const Element& e, int parent_id, int parent_z, bool parent_hidden)
    {
        const bool hidden = parent_hidden || is_hidden(e);
        const int z = e.z.value_or(parent_z);
        DomNode n;
        n.node_id = static_cast<int>(nodes.size());
        n.parent_id = parent_id;
        n.tag = e.tag;
        n.attributes = e.attrs;
        if (!e.id.empty()) n.attributes["id"] = e.id;
        if (!e.cls.empty()) n.attributes["class"] = e.cls;
        n.own_text = text::normalize_whitespace(e.text);
        n.bbox = hidden ? Rect{} : e.box;
        n.z_index = z;
        n.visible = !hidden && !e.box.empty();
        n.cursor_style = e.cursor;
        const int id = n.node_id;
        nodes.push_back(std::move(n));
        elements.push_back(&e);
        if (!hidden) {
            content_bottom = std::max(content_bottom, e.box.bottom());
            if (!is_media(e)) paint.push_back({&e, z, paint_order++});
            for (const auto& s : e.shadow) add_shadow(s, z);
        }
        for (const auto& c : e.children) add(c, id, z, hidden);
    }
};

} // namespace

RgbImage blank_page(const Viewport& vp, Rgb color)
{
    return RgbImage(vp.width_px, vp.height_px, color);
}

RenderedPage render(const Fixture& fx, const PageState& state, Timestamp fetched_at)
{
    Builder b{fx, state, {}, {}, {}, 0, 0};
    const double vw = fx.viewport.width_px;
    const double vh = fx.viewport.height_px;

    DomNode html;
    html.node_id = 0;
    html.tag = "html";
    html.attributes["lang"] = fx.lang;
    html.visible = true;
    b.nodes.push_back(html);
    b.elements.push_back(nullptr);
    DomNode body;
    body.node_id = 1;
    body.parent_id = 0;
    body.tag = "body";
    body.visible = true;
    b.nodes.push_back(body);
    b.elements.push_back(nullptr);

    for (const auto& e : fx.body) b.add(e, 1, 0, false);

    const double page_h = std::max(vh, b.content_bottom);
    b.nodes[0].bbox = {0, 0, vw, page_h};
    b.nodes[1].bbox = {0, 0, vw, page_h};

    RgbImage shot(fx.viewport.width_px, fx.viewport.height_px, fx.page_bg);
    std::stable_sort(b.paint.begin(), b.paint.end(), [](const PaintItem& x, const PaintItem& y) {
        return x.z != y.z ? x.z < y.z : x.order < y.order;
    });
    for (const auto& item : b.paint) {
        const auto& e = *item.element;
        const auto px = to_pixels(e.box);
        std::optional<Rgba> bg = e.bg;
        if (e.dynamic) {
            bg = Rgba{dynamic_palette[state.load_index % std::size(dynamic_palette)], 1.0};
        }
        if (bg) fill_blended(shot, px, *bg);
        if (e.border && px.w > 0 && px.h > 0) {
            const Rgba c{*e.border, 1.0};
            fill_blended(shot, {px.x, px.y, px.w, 1}, c);
            fill_blended(shot, {px.x, px.y + px.h - 1, px.w, 1}, c);
            fill_blended(shot, {px.x, px.y, 1, px.h}, c);
            fill_blended(shot, {px.x + px.w - 1, px.y, 1, px.h}, c);
        }
        paint_text(shot, e);
    }

    SnapshotData data;
    data.url = fx.url;
    data.fetched_at = fetched_at;
    data.viewport = fx.viewport;
    data.nodes = std::move(b.nodes);
    data.screenshot = std::move(shot);
    return {PageSnapshot(std::move(data)), std::move(b.elements)};
}

} // namespace consentscan::fixtures
