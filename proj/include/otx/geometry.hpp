#pragma once

#include <algorithm>
#include <cstdint>

namespace otx {

// Axis-aligned pixel rectangle: covers [x, x+w) x [y, y+h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;
};

inline std::int64_t area(const Rect& r) {
    if (r.w <= 0 || r.h <= 0) return 0;
    return static_cast<std::int64_t>(r.w) * r.h;
}

inline Rect intersect(const Rect& a, const Rect& b) {
    int x0 = std::max(a.x, b.x);
    int y0 = std::max(a.y, b.y);
    int x1 = std::min(a.x + a.w, b.x + b.w);
    int y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return Rect{};
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

inline std::int64_t intersection_area(const Rect& a, const Rect& b) {
    return area(intersect(a, b));
}

// Bounding box of both rectangles.
inline Rect bounding_union(const Rect& a, const Rect& b) {
    if (area(a) == 0) return b;
    if (area(b) == 0) return a;
    int x0 = std::min(a.x, b.x);
    int y0 = std::min(a.y, b.y);
    int x1 = std::max(a.x + a.w, b.x + b.w);
    int y1 = std::max(a.y + a.h, b.y + b.h);
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

inline double iou(const Rect& a, const Rect& b) {
    std::int64_t inter = intersection_area(a, b);
    std::int64_t uni = area(a) + area(b) - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline bool contains(const Rect& outer, const Rect& inner) {
    return inner.x >= outer.x && inner.y >= outer.y &&
           inner.x + inner.w <= outer.x + outer.w &&
           inner.y + inner.h <= outer.y + outer.h;
}

}  // namespace otx
