#include "consentscan/perceptive.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace consentscan::perceptive {

std::string to_string(ContourStrategy s)
{
    return s == ContourStrategy::largest_containing ? "largest_containing" : "smallest_containing";
}

ContourStrategy parse_contour_strategy(const std::string& s)
{
    if (s == "smallest_containing" || s == "smallest") return ContourStrategy::smallest_containing;
    if (s == "largest_containing" || s == "largest") return ContourStrategy::largest_containing;
    throw std::invalid_argument("unknown contour strategy: " + s);
}

void PerceptiveConfig::validate() const
{
    if (threshold < 0 || threshold > 255) {
        throw std::invalid_argument("perceptive threshold must be in [0, 255]");
    }
    if (!(max_contour_frac > 0.0 && max_contour_frac <= 1.0)) {
        throw std::invalid_argument("max_contour_frac must be in (0, 1]");
    }
    if (min_contour_area_px < 1) {
        throw std::invalid_argument("min_contour_area_px must be positive");
    }
    if (fit_tolerance_px < 0) {
        throw std::invalid_argument("fit tolerance must be non-negative");
    }
}

namespace {

PixelRect covering_pixels(const Rect& r)
{
    const int x0 = static_cast<int>(std::floor(r.x));
    const int y0 = static_cast<int>(std::floor(r.y));
    const int x1 = static_cast<int>(std::ceil(r.right()));
    const int y1 = static_cast<int>(std::ceil(r.bottom()));
    return {x0, y0, x1 - x0, y1 - y0};
}

std::uint32_t pack(Rgb c)
{
    return (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | c.b;
}

} // namespace

Rgb sample_background_color(const RgbImage& screenshot, const Rect& keyword_bbox)
{
    const auto area = screenshot.clip(covering_pixels(keyword_bbox));
    if (area.w <= 0 || area.h <= 0) {
        throw std::invalid_argument("keyword bbox does not intersect the screenshot");
    }
    // std::map iterates keys ascending, so the first maximum is the smallest (R,G,B).
    std::map<std::uint32_t, long long> counts;
    for (int y = area.y; y < area.y + area.h; ++y) {
        for (int x = area.x; x < area.x + area.w; ++x) {
            ++counts[pack(screenshot.at(x, y))];
        }
    }
    std::uint32_t best = 0;
    long long best_count = -1;
    for (const auto& [key, n] : counts) {
        if (n > best_count) {
            best = key;
            best_count = n;
        }
    }
    return {std::uint8_t(best >> 16), std::uint8_t(best >> 8), std::uint8_t(best)};
}

RgbImage xor_image(const RgbImage& image, Rgb color)
{
    RgbImage out = image;
    auto bytes = out.bytes();
    for (std::size_t i = 0; i + 2 < bytes.size(); i += 3) {
        bytes[i] ^= color.r;
        bytes[i + 1] ^= color.g;
        bytes[i + 2] ^= color.b;
    }
    return out;
}

BinaryImage binarize(const GrayImage& gray, int threshold)
{
    BinaryImage out(gray.width() + 2, gray.height() + 2, false);
    for (int y = 0; y < gray.height(); ++y) {
        for (int x = 0; x < gray.width(); ++x) {
            if (gray.at(x, y) > threshold) {
                out.set(x + 1, y + 1, true);
            }
        }
    }
    return out;
}

BinaryImage invert_interior(const BinaryImage& bin)
{
    BinaryImage out(bin.width(), bin.height(), false);
    for (int y = 1; y + 1 < bin.height(); ++y) {
        for (int x = 1; x + 1 < bin.width(); ++x) {
            out.set(x, y, !bin.at(x, y));
        }
    }
    return out;
}

RegionLabels label_regions(const BinaryImage& bin)
{
    RegionLabels labels{bin.width(), bin.height(),
                        std::vector<int>(static_cast<std::size_t>(bin.width()) * bin.height(), -1)};
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int y = 0; y < bin.height(); ++y) {
        for (int x = 0; x < bin.width(); ++x) {
            if (!bin.at(x, y) || labels.at(x, y) >= 0) continue;
            const int id = next++;
            labels.label[static_cast<std::size_t>(y) * bin.width() + x] = id;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= bin.width() || ny >= bin.height()) continue;
                        auto& slot = labels.label[static_cast<std::size_t>(ny) * bin.width() + nx];
                        if (slot >= 0 || !bin.at(nx, ny)) continue;
                        slot = id;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
        }
    }
    return labels;
}

namespace {

std::vector<Contour> contours_from_labels(const RegionLabels& labels)
{
    struct Acc {
        int x0, y0, x1, y1;
        long long n = 0;
    };
    std::vector<Acc> acc;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int id = labels.at(x, y);
            if (id < 0) continue;
            if (id >= static_cast<int>(acc.size())) {
                acc.resize(id + 1, Acc{x, y, x, y, 0});
            }
            auto& a = acc[id];
            if (a.n == 0) {
                a = {x, y, x, y, 0};
            }
            a.x0 = std::min(a.x0, x);
            a.y0 = std::min(a.y0, y);
            a.x1 = std::max(a.x1, x);
            a.y1 = std::max(a.y1, y);
            ++a.n;
        }
    }
    std::vector<Contour> out;
    out.reserve(acc.size());
    for (int id = 0; id < static_cast<int>(acc.size()); ++id) {
        const auto& a = acc[id];
        out.push_back({{a.x0, a.y0, a.x1 - a.x0 + 1, a.y1 - a.y0 + 1}, a.n, id});
    }
    std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
        return std::tie(a.bbox.y, a.bbox.x, a.region_id) < std::tie(b.bbox.y, b.bbox.x, b.region_id);
    });
    return out;
}

} // namespace

std::vector<Contour> find_contours(const BinaryImage& bin)
{
    return contours_from_labels(label_regions(bin));
}

std::optional<Contour> pick_contour(const std::vector<Contour>& contours, Point point, const PerceptiveConfig& cfg,
                                    double viewport_area)
{
    std::optional<Contour> best;
    for (const auto& c : contours) {
        if (!c.bbox.to_rect().contains(point)) continue;
        if (c.area_px < cfg.min_contour_area_px) continue;
        if (static_cast<double>(c.bbox.area()) > cfg.max_contour_frac * viewport_area) continue;
        if (!best) {
            best = c;
        } else if (cfg.contour_strategy == ContourStrategy::smallest_containing ? c.bbox.area() < best->bbox.area()
                                                                                : c.bbox.area() > best->bbox.area()) {
            best = c;
        }
    }
    return best;
}

int refine_upward(const PageSnapshot& snapshot, int node_id, const PixelRect& contour_bbox, double tolerance)
{
    const Rect bound = contour_bbox.to_rect().inflated(tolerance);
    int current = node_id;
    while (auto parent = snapshot.parent(current)) {
        const auto& pb = snapshot.node(*parent).bbox;
        const double current_area = snapshot.node(current).bbox.area();
        if (!(pb.area() > current_area && pb.area() <= bound.area() && bound.encloses(pb))) {
            break;
        }
        current = *parent;
    }
    return current;
}

std::optional<DetectionResult> detect_perceptive(const PageSnapshot& snapshot, const domwalk::KeywordConfig& kw,
                                                 const PerceptiveConfig& cfg)
{
    const auto hit = domwalk::select_longest_hit(domwalk::find_keyword_hits(snapshot, kw));
    if (!hit) {
        return std::nullopt;
    }
    const auto& shot = snapshot.screenshot();
    const auto viewport = snapshot.viewport().rect();
    const Rect keyword_box = snapshot.node(hit->node_id).bbox.intersection(viewport);
    const Rgb background = sample_background_color(shot, keyword_box);

    // Pixels matching the keyword's background become foreground; the false
    // border keeps regions touching the screenshot edge closed.
    const auto mask = invert_interior(binarize(to_grayscale(xor_image(shot, background)), cfg.threshold));
    const auto labels = label_regions(mask);
    auto contours = contours_from_labels(labels);
    for (auto& c : contours) {
        c.bbox.x -= 1;
        c.bbox.y -= 1;
    }

    const Point keyword_point{hit->x, hit->y};
    const auto chosen = pick_contour(contours, keyword_point, cfg, viewport.area());
    if (!chosen) {
        return std::nullopt;
    }

    std::optional<Point> first;
    for (int y = chosen->bbox.y; y < chosen->bbox.y + chosen->bbox.h && !first; ++y) {
        for (int x = chosen->bbox.x; x < chosen->bbox.x + chosen->bbox.w; ++x) {
            if (labels.at(x + 1, y + 1) == chosen->region_id) {
                first = Point{double(x), double(y)};
                break;
            }
        }
    }
    const auto start = node_at_point(snapshot, first->x, first->y);
    if (!start) {
        return std::nullopt;
    }
    const int node = refine_upward(snapshot, *start, chosen->bbox, cfg.fit_tolerance_px);
    const auto& n = snapshot.node(node);
    if (n.bbox.area() == 0 || n.tag == "body" || n.tag == "html") {
        return std::nullopt;
    }
    auto result = make_detection(snapshot, Method::perceptive, node, 1.0);
    if (!result.bbox.contains(keyword_point)) {
        return std::nullopt;
    }
    return result;
}

} // namespace consentscan::perceptive
