#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "consentscan/detection.hpp"
#include "consentscan/domwalk.hpp"
#include "consentscan/image.hpp"
#include "consentscan/snapshot.hpp"

namespace consentscan::perceptive {

/// Row-major boolean grid; true marks foreground.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, bool fill = false)
        : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0)
    {
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Contour {
    PixelRect bbox;
    long long area_px = 0; // pixels in the connected region
    int region_id = 0;

    friend bool operator==(const Contour&, const Contour&) = default;
};

enum class ContourStrategy { smallest_containing, largest_containing };

std::string to_string(ContourStrategy s);
ContourStrategy parse_contour_strategy(const std::string& s);

struct PerceptiveConfig {
    int threshold = 10;
    ContourStrategy contour_strategy = ContourStrategy::smallest_containing;
    long long min_contour_area_px = 400;
    double max_contour_frac = 0.95;
    /// Slack (px) when checking that an ancestor fits inside the contour.
    double fit_tolerance_px = 2.0;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Most frequent color inside the rect; ties go to the lexicographically smallest (R,G,B).
/// Throws std::invalid_argument when the rect does not intersect the image.
Rgb sample_background_color(const RgbImage& screenshot, const Rect& keyword_bbox);

/// Channel-wise XOR with `color`; pixels equal to `color` become black.
RgbImage xor_image(const RgbImage& image, Rgb color);

/// bit = gray > threshold, on a grid one pixel larger on every side whose border is false.
BinaryImage binarize(const GrayImage& gray, int threshold);

/// Foreground/background swap of the interior; the one-pixel border stays false.
BinaryImage invert_interior(const BinaryImage& bin);

/// 8-connected components of foreground pixels, ordered by (bbox.y, bbox.x, region_id).
/// Coordinates are those of `bin`.
std::vector<Contour> find_contours(const BinaryImage& bin);

/// Filters contours whose bbox contains `point`, with at least min_contour_area_px
/// pixels and bbox area at most max_contour_frac of `viewport_area`; returns the
/// smallest or largest by bbox area (ties by list order).
std::optional<Contour> pick_contour(const std::vector<Contour>& contours, Point point, const PerceptiveConfig& cfg,
                                    double viewport_area);

/// Climbs to the parent while it grows, stays within the contour's area and fits
/// inside the contour bbox (both with fit tolerance).
int refine_upward(const PageSnapshot& snapshot, int node_id, const PixelRect& contour_bbox, double tolerance = 2.0);

/// Per-pixel region ids of the 8-connected foreground components; ids follow
/// row-major discovery order.
struct RegionLabels {
    int width = 0;
    int height = 0;
    std::vector<int> label; // -1 for background

    int at(int x, int y) const { return label[static_cast<std::size_t>(y) * width + x]; }
};
RegionLabels label_regions(const BinaryImage& bin);

std::optional<DetectionResult> detect_perceptive(const PageSnapshot& snapshot, const domwalk::KeywordConfig& kw,
                                                 const PerceptiveConfig& cfg);

} // namespace consentscan::perceptive
