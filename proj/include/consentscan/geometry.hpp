#pragma once

#include <algorithm>
#include <compare>

namespace consentscan {

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle in CSS pixels. Containment is half-open: [x, x+w) x [y, y+h).
struct Rect {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double area() const { return w * h; }
    bool empty() const { return w <= 0 || h <= 0; }
    Point center() const { return {x + w / 2, y + h / 2}; }

    bool contains(Point p) const { return p.x >= x && p.x < right() && p.y >= y && p.y < bottom(); }

    /// True when `inner` lies inside this rect grown by `tolerance` on every side.
    bool encloses(const Rect& inner, double tolerance = 0) const
    {
        return inner.x >= x - tolerance && inner.y >= y - tolerance && inner.right() <= right() + tolerance &&
               inner.bottom() <= bottom() + tolerance;
    }

    Rect inflated(double by) const { return {x - by, y - by, w + 2 * by, h + 2 * by}; }

    Rect intersection(const Rect& o) const
    {
        const double l = std::max(x, o.x);
        const double t = std::max(y, o.y);
        const double r = std::min(right(), o.right());
        const double b = std::min(bottom(), o.bottom());
        if (r <= l || b <= t) {
            return {l, t, 0, 0};
        }
        return {l, t, r - l, b - t};
    }

    bool intersects(const Rect& o) const { return !intersection(o).empty(); }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Integer pixel rectangle used by the image pipeline.
struct PixelRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long long area() const { return static_cast<long long>(w) * h; }
    bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
    Rect to_rect() const { return {double(x), double(y), double(w), double(h)}; }

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
    friend auto operator<=>(const PixelRect&, const PixelRect&) = default;
};

/// Intersection over union; 0 when either rect is empty.
inline double iou(const Rect& a, const Rect& b)
{
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    const double inter = a.intersection(b).area();
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

} // namespace consentscan
