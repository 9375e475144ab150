#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "otx/geometry.hpp"

namespace otx {

// Interleaved 8-bit RGB image.
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // size = 3*width*height, row-major

    ColorImage() = default;
    ColorImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(3) * w * h, 0) {}

    std::uint8_t* px(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* px(int x, int y) const {
        return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    bool empty() const { return width <= 0 || height <= 0; }
};

// Single-channel luminance in [0,1].
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<float> lum;

    GrayFrame() = default;
    GrayFrame(int w, int h) : width(w), height(h), lum(static_cast<std::size_t>(w) * h, 0.f) {}

    float& at(int x, int y) { return lum[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return lum[static_cast<std::size_t>(y) * width + x]; }
};

// Raw gradient magnitudes (>= 0) with the recorded maximum.
struct GradientMap {
    int width = 0;
    int height = 0;
    std::vector<float> mag;
    float g_max = 0.f;

    float& at(int x, int y) { return mag[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return mag[static_cast<std::size_t>(y) * width + x]; }
};

// Edge map in [0,1]; the detection stage consumes this. Produced either by
// the full contrast-enhancement pipeline or by plain g_max normalization.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<float> val;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h), val(static_cast<std::size_t>(w) * h, 0.f) {}

    float& at(int x, int y) { return val[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return val[static_cast<std::size_t>(y) * width + x]; }
};

// Per-pixel {0,1} mask, 1 = text foreground.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryImage() = default;
    BinaryImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
};

inline ColorImage crop(const ColorImage& img, const Rect& r) {
    ColorImage out(r.w, r.h);
    for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x) {
            const std::uint8_t* s = img.px(r.x + x, r.y + y);
            std::uint8_t* d = out.px(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    return out;
}

}  // namespace otx
