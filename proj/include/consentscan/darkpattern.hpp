#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "consentscan/clickables.hpp"
#include "consentscan/image.hpp"
#include "consentscan/outcome.hpp"

namespace consentscan::darkpattern {

struct SsimParams {
    int block = 8;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Mean SSIM over non-overlapping block x block windows of the BT.601 luma.
/// Partial blocks at the right and bottom edges are ignored; images smaller
/// than one block are compared as a single window. Throws std::invalid_argument
/// on a dimension mismatch or empty image.
double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params = {});
double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

/// Majority vote over colors quantized to 4 bits per channel; returns the rounded
/// mean of the winning bucket's pixels. Ties go to the smallest quantized (R,G,B).
/// Throws std::invalid_argument when the bbox covers no pixel of the image.
Rgb dominant_color(const RgbImage& image, const Rect& bbox);

double color_distance(Rgb a, Rgb b);

struct DeclineVerdict {
    bool detected = false;
    std::optional<std::pair<int, int>> evidence; // clickable node ids
    double best_ssim = 0.0;
};

/// True iff two distinct clicked buttons produced post-click screenshots with
/// SSIM >= theta. Evidence is the pair with the highest SSIM (first pair on ties).
DeclineVerdict detect_decline(const std::vector<interaction::ClickOutcome>& outcomes, double theta = 0.99,
                              const SsimParams& params = {});

struct ColorVerdict {
    bool diversion = false;
    std::vector<std::pair<int, Rgb>> colors;  // (clickable id, dominant color)
    std::vector<std::vector<int>> groups;     // clickable ids per color group
};

/// True iff two button/link clickables have dominant colors farther apart than max_distance.
ColorVerdict detect_color_diversion(const std::vector<interaction::Clickable>& clickables,
                                    double max_distance = 32.0);

/// A link, or a clickable without its own background (dominant color within
/// max_distance of the notice background).
bool is_link_styled(const interaction::Clickable& c, Rgb notice_background, double max_distance = 32.0);

struct AnalysisConfig {
    double ssim_threshold = 0.99;
    double color_distance = 32.0;
    SsimParams ssim;
};

struct NoticeAnalysis {
    bool decline_detected = false;
    std::optional<std::pair<int, int>> decline_evidence;
    double best_pair_ssim = 0.0;
    /// Normalized Levenshtein similarity of the evidence pair's post-click page texts.
    std::optional<double> text_similarity;
    bool color_diversion = false;
    std::vector<std::pair<int, Rgb>> distinct_colors;
    Rgb notice_background;
    std::vector<int> link_styled;
    double ssim_threshold_used = 0.99;
};

/// Fills each clickable's dominant color from the initial screenshot and derives all verdicts.
NoticeAnalysis analyze_notice(const RgbImage& initial_screenshot, const Rect& notice_bbox,
                              std::vector<interaction::Clickable>& clickables,
                              const std::vector<interaction::ClickOutcome>& outcomes, const AnalysisConfig& cfg = {});

nlohmann::json to_json(const NoticeAnalysis& a);

} // namespace consentscan::darkpattern
