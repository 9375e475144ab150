#include "otx/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otx::preprocess {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline int bin256(double x) {
    int b = static_cast<int>(x * 256.0);
    return b > 255 ? 255 : (b < 0 ? 0 : b);
}

}  // namespace

GrayFrame to_luminance(const ColorImage& frame) {
    if (frame.width < 3 || frame.height < 3) throw std::invalid_argument("frame too small");
    GrayFrame g(frame.width, frame.height);
    const std::uint8_t* p = frame.rgb.data();
    for (std::size_t i = 0; i < g.lum.size(); ++i, p += 3) {
        g.lum[i] = static_cast<float>((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0);
    }
    return g;
}

GradientMap scharr_gradient(const GrayFrame& frame) {
    const int w = frame.width;
    const int h = frame.height;
    GradientMap out;
    out.width = w;
    out.height = h;
    out.mag.assign(static_cast<std::size_t>(w) * h, 0.f);

    float gmax = 0.f;
    for (int y = 0; y < h; ++y) {
        const int ym = clampi(y - 1, 0, h - 1);
        const int yp = clampi(y + 1, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = clampi(x - 1, 0, w - 1);
            const int xp = clampi(x + 1, 0, w - 1);
            const float a = frame.at(xm, ym), b = frame.at(x, ym), c = frame.at(xp, ym);
            const float d = frame.at(xm, y), f = frame.at(xp, y);
            const float g2 = frame.at(xm, yp), hh = frame.at(x, yp), i2 = frame.at(xp, yp);
            const float gx = 3.f * (c - a) + 10.f * (f - d) + 3.f * (i2 - g2);
            const float gy = 3.f * (g2 - a) + 10.f * (hh - b) + 3.f * (i2 - c);
            const float m = std::sqrt(gx * gx + gy * gy);
            out.at(x, y) = m;
            if (m > gmax) gmax = m;
        }
    }
    out.g_max = gmax;
    return out;
}

std::array<std::uint64_t, 256> gradient_histogram(const GradientMap& gmap) {
    std::array<std::uint64_t, 256> hist{};
    if (gmap.g_max <= 0.f) {
        hist[0] = gmap.mag.size();
        return hist;
    }
    const double inv = 1.0 / gmap.g_max;
    for (float m : gmap.mag) ++hist[bin256(m * inv)];
    return hist;
}

double otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
    std::uint64_t total = 0;
    int nonzero_bins = 0, last_bin = 0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        if (hist[i] > 0) {
            ++nonzero_bins;
            last_bin = i;
        }
    }
    if (total == 0) throw std::invalid_argument("empty histogram");
    if (nonzero_bins == 1) return (last_bin + 0.5) / 256.0;

    // Direct per-threshold evaluation; class 0 = bins [0..t].
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        std::uint64_t n0 = 0;
        double s0 = 0.0;
        for (int i = 0; i <= t; ++i) {
            n0 += hist[i];
            s0 += static_cast<double>(hist[i]) * i;
        }
        std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        double s1 = 0.0;
        for (int i = t + 1; i < 256; ++i) s1 += static_cast<double>(hist[i]) * i;
        const double mu0 = s0 / static_cast<double>(n0);
        const double mu1 = s1 / static_cast<double>(n1);
        const double w0 = static_cast<double>(n0) / static_cast<double>(total);
        const double w1 = static_cast<double>(n1) / static_cast<double>(total);
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return (best_t + 0.5) / 256.0;
}

StretchParams compute_stretch_params(double otsu_level, double g_max) {
    if (g_max <= 0.0) throw std::runtime_error("blank frame");
    StretchParams p;
    p.otsu_level = otsu_level;
    double a = (otsu_level < 0.5) ? 1.0 / (1.0 - 2.0 * otsu_level) : kAlphaMax;
    p.alpha = std::clamp(a, kAlphaMin, kAlphaMax);
    p.suppress_floor = (p.alpha - 1.0) / (2.0 * p.alpha);
    p.norm_scale = 0.0;
    return p;
}

EdgeMap contrast_stretch(const GradientMap& gmap, StretchParams& params) {
    EdgeMap out(gmap.width, gmap.height);
    const double inv = gmap.g_max > 0.f ? 1.0 / gmap.g_max : 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < gmap.mag.size(); ++i) {
        const double x = gmap.mag[i] * inv;
        double v = params.alpha * (x - 0.5) + 0.5;
        if (v < 0.0) v = 0.0;
        out.val[i] = static_cast<float>(v);
        if (v > peak) peak = v;
    }
    params.norm_scale = peak;
    if (peak > 0.0) {
        const float s = static_cast<float>(1.0 / peak);
        for (auto& v : out.val) v *= s;
    }
    return out;
}

EdgeMap histogram_equalize(const EdgeMap& stretched) {
    std::array<std::uint64_t, 256> hist{};
    std::uint64_t nonzero = 0;
    for (float v : stretched.val) {
        if (v > 0.f) {
            ++hist[bin256(v)];
            ++nonzero;
        }
    }
    EdgeMap out(stretched.width, stretched.height);
    if (nonzero == 0) return out;

    std::array<float, 256> cdf{};
    std::uint64_t run = 0;
    for (int i = 0; i < 256; ++i) {
        run += hist[i];
        cdf[i] = static_cast<float>(static_cast<double>(run) / static_cast<double>(nonzero));
    }
    for (std::size_t i = 0; i < stretched.val.size(); ++i) {
        const float v = stretched.val[i];
        out.val[i] = v > 0.f ? cdf[bin256(v)] : 0.f;
    }
    return out;
}

EdgeMap enhance(const GrayFrame& frame, EnhanceDebug* debug) {
    GradientMap gmap = scharr_gradient(frame);
    const auto hist = gradient_histogram(gmap);
    const double level = otsu_threshold(hist);
    StretchParams params = compute_stretch_params(level, gmap.g_max);
    EdgeMap stretched = contrast_stretch(gmap, params);
    if (debug) {
        debug->normalized = EdgeMap(gmap.width, gmap.height);
        const float inv = 1.f / gmap.g_max;
        for (std::size_t i = 0; i < gmap.mag.size(); ++i)
            debug->normalized.val[i] = gmap.mag[i] * inv;
        debug->stretched = stretched;
        debug->params = params;
    }
    return histogram_equalize(stretched);
}

EdgeMap normalized_gradient(const GrayFrame& frame) {
    GradientMap gmap = scharr_gradient(frame);
    EdgeMap out(gmap.width, gmap.height);
    if (gmap.g_max <= 0.f) return out;
    const float inv = 1.f / gmap.g_max;
    for (std::size_t i = 0; i < gmap.mag.size(); ++i) out.val[i] = gmap.mag[i] * inv;
    return out;
}

}  // namespace otx::preprocess
