#include "consentscan/darkpattern.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "consentscan/text.hpp"

namespace consentscan::darkpattern {

using nlohmann::json;

namespace {

// Exact integer moments keep ssim(a, a) == 1 and ssim(a, b) == ssim(b, a) bit-for-bit.
double window_ssim(const GrayImage& a, const GrayImage& b, int x0, int y0, int w, int h, double c1, double c2)
{
    std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            const std::int64_t va = a.at(x, y);
            const std::int64_t vb = b.at(x, y);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
        }
    }
    const double n = static_cast<double>(w) * h;
    const double mu_a = sa / n;
    const double mu_b = sb / n;
    const double var_a = saa / n - mu_a * mu_a;
    const double var_b = sbb / n - mu_b * mu_b;
    const double cov = sab / n - mu_a * mu_b;
    const double num = (2 * mu_a * mu_b + c1) * (2 * cov + c2);
    const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
    return num / den;
}

PixelRect covering_pixels(const Rect& r)
{
    const int x0 = static_cast<int>(std::floor(r.x));
    const int y0 = static_cast<int>(std::floor(r.y));
    const int x1 = static_cast<int>(std::ceil(r.right()));
    const int y1 = static_cast<int>(std::ceil(r.bottom()));
    return {x0, y0, x1 - x0, y1 - y0};
}

json color_pair(int id, Rgb c)
{
    return {{"clickable_id", id}, {"color", to_hex(c)}};
}

} // namespace

double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("ssim: image dimensions differ");
    }
    if (a.width() == 0 || a.height() == 0) {
        throw std::invalid_argument("ssim: empty image");
    }
    const double c1 = params.c1();
    const double c2 = params.c2();
    const int k = params.block;
    if (a.width() < k || a.height() < k) {
        return window_ssim(a, b, 0, 0, a.width(), a.height(), c1, c2);
    }
    double sum = 0;
    long long count = 0;
    for (int y = 0; y + k <= a.height(); y += k) {
        for (int x = 0; x + k <= a.width(); x += k) {
            sum += window_ssim(a, b, x, y, k, k, c1, c2);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("ssim: image dimensions differ");
    }
    return ssim(to_grayscale(a), to_grayscale(b), params);
}

Rgb dominant_color(const RgbImage& image, const Rect& bbox)
{
    const auto area = image.clip(covering_pixels(bbox));
    if (area.w <= 0 || area.h <= 0) {
        throw std::invalid_argument("dominant_color: empty bbox");
    }
    struct Bucket {
        long long n = 0;
        long long r = 0, g = 0, b = 0;
    };
    std::map<std::tuple<int, int, int>, Bucket> buckets;
    for (int y = area.y; y < area.y + area.h; ++y) {
        for (int x = area.x; x < area.x + area.w; ++x) {
            const auto c = image.at(x, y);
            auto& bk = buckets[{c.r >> 4, c.g >> 4, c.b >> 4}];
            ++bk.n;
            bk.r += c.r;
            bk.g += c.g;
            bk.b += c.b;
        }
    }
    const Bucket* best = nullptr;
    for (const auto& [key, bk] : buckets) {
        if (!best || bk.n > best->n) best = &bk;
    }
    const auto mean = [n = best->n](long long s) { return static_cast<std::uint8_t>((2 * s + n) / (2 * n)); };
    return {mean(best->r), mean(best->g), mean(best->b)};
}

double color_distance(Rgb a, Rgb b)
{
    const double dr = double(a.r) - b.r;
    const double dg = double(a.g) - b.g;
    const double db = double(a.b) - b.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

DeclineVerdict detect_decline(const std::vector<interaction::ClickOutcome>& outcomes, double theta,
                              const SsimParams& params)
{
    DeclineVerdict v;
    std::vector<const interaction::ClickOutcome*> buttons;
    for (const auto& o : outcomes) {
        if (o.clickable.kind == interaction::ClickableKind::button && o.clicked()) buttons.push_back(&o);
    }
    bool have_pair = false;
    for (std::size_t i = 0; i < buttons.size(); ++i) {
        for (std::size_t j = i + 1; j < buttons.size(); ++j) {
            if (buttons[i]->clickable.node_id == buttons[j]->clickable.node_id) continue;
            const auto& a = buttons[i]->post_screenshot;
            const auto& b = buttons[j]->post_screenshot;
            if (a.width() != b.width() || a.height() != b.height()) continue;
            const double s = ssim(a, b, params);
            if (!have_pair || s > v.best_ssim) {
                have_pair = true;
                v.best_ssim = s;
                v.evidence = std::make_pair(buttons[i]->clickable.node_id, buttons[j]->clickable.node_id);
            }
        }
    }
    v.detected = have_pair && v.best_ssim >= theta;
    if (!v.detected) v.evidence.reset();
    return v;
}

ColorVerdict detect_color_diversion(const std::vector<interaction::Clickable>& clickables, double max_distance)
{
    ColorVerdict v;
    std::vector<Rgb> representatives;
    for (const auto& c : clickables) {
        if (c.kind == interaction::ClickableKind::checkbox || !c.dominant_color) continue;
        const Rgb color = *c.dominant_color;
        for (const auto& [id, other] : v.colors) {
            if (color_distance(color, other) > max_distance) v.diversion = true;
        }
        v.colors.emplace_back(c.node_id, color);
        bool grouped = false;
        for (std::size_t g = 0; g < representatives.size(); ++g) {
            if (color_distance(color, representatives[g]) <= max_distance) {
                v.groups[g].push_back(c.node_id);
                grouped = true;
                break;
            }
        }
        if (!grouped) {
            representatives.push_back(color);
            v.groups.push_back({c.node_id});
        }
    }
    return v;
}

bool is_link_styled(const interaction::Clickable& c, Rgb notice_background, double max_distance)
{
    if (c.kind == interaction::ClickableKind::link) return true;
    return c.dominant_color && color_distance(*c.dominant_color, notice_background) <= max_distance;
}

NoticeAnalysis analyze_notice(const RgbImage& initial_screenshot, const Rect& notice_bbox,
                              std::vector<interaction::Clickable>& clickables,
                              const std::vector<interaction::ClickOutcome>& outcomes, const AnalysisConfig& cfg)
{
    NoticeAnalysis a;
    a.ssim_threshold_used = cfg.ssim_threshold;
    a.notice_background = dominant_color(initial_screenshot, notice_bbox);
    for (auto& c : clickables) {
        const auto clipped = initial_screenshot.clip(covering_pixels(c.bbox));
        if (clipped.w > 0 && clipped.h > 0) {
            c.dominant_color = dominant_color(initial_screenshot, c.bbox);
        }
    }
    const auto decline = detect_decline(outcomes, cfg.ssim_threshold, cfg.ssim);
    a.decline_detected = decline.detected;
    a.decline_evidence = decline.evidence;
    a.best_pair_ssim = decline.best_ssim;
    if (decline.evidence) {
        const std::string* ta = nullptr;
        const std::string* tb = nullptr;
        for (const auto& o : outcomes) {
            if (o.clickable.node_id == decline.evidence->first) ta = &o.body_text;
            if (o.clickable.node_id == decline.evidence->second) tb = &o.body_text;
        }
        if (ta && tb) a.text_similarity = text::normalized_levenshtein_similarity(*ta, *tb);
    }
    const auto colors = detect_color_diversion(clickables, cfg.color_distance);
    a.color_diversion = colors.diversion;
    a.distinct_colors = colors.colors;
    for (const auto& c : clickables) {
        if (c.kind != interaction::ClickableKind::checkbox && is_link_styled(c, a.notice_background, cfg.color_distance)) {
            a.link_styled.push_back(c.node_id);
        }
    }
    return a;
}

json to_json(const NoticeAnalysis& a)
{
    json colors = json::array();
    for (const auto& [id, c] : a.distinct_colors) colors.push_back(color_pair(id, c));
    json j = {
        {"decline_detected", a.decline_detected},
        {"decline_evidence", a.decline_evidence ? json{a.decline_evidence->first, a.decline_evidence->second}
                                                : json(nullptr)},
        {"best_pair_ssim", a.best_pair_ssim},
        {"text_similarity", a.text_similarity ? json(*a.text_similarity) : json(nullptr)},
        {"color_diversion", a.color_diversion},
        {"distinct_colors", std::move(colors)},
        {"notice_background", to_hex(a.notice_background)},
        {"link_styled", a.link_styled},
        {"ssim_threshold_used", a.ssim_threshold_used},
    };
    return j;
}

} // namespace consentscan::darkpattern
