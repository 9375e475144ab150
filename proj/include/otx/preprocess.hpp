#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "otx/image.hpp"

namespace otx::preprocess {

// Linear-stretch parameters derived from the gradient histogram. The stretch
// maps normalized magnitude x to alpha*(x - 0.5) + 0.5, clamps negatives to
// zero and rescales by the post-clamp maximum, so everything below
// suppress_floor = (alpha - 1) / (2*alpha) is nulled.
struct StretchParams {
    double otsu_level = 0.0;     // normalized threshold in [0,1)
    double alpha = 1.0;          // stretch factor, > 1
    double suppress_floor = 0.0; // lowest surviving normalized magnitude
    double norm_scale = 0.0;     // post-clamp maximum; set by contrast_stretch
};

inline constexpr double kAlphaMin = 1.0 + 1e-6;
inline constexpr double kAlphaMax = 100.0;

// Rec.601 luminance. Throws std::invalid_argument for frames smaller than 3x3.
GrayFrame to_luminance(const ColorImage& frame);

// 3x3 Scharr magnitude with replicate borders.
GradientMap scharr_gradient(const GrayFrame& frame);

// 256-bin histogram of magnitudes normalized by g_max.
std::array<std::uint64_t, 256> gradient_histogram(const GradientMap& gmap);

// Threshold (bin center, in [0,1)) maximizing between-class variance;
// ties break toward the lower bin. A single populated bin returns that
// bin's center. Throws std::invalid_argument on an all-zero histogram.
double otsu_threshold(const std::array<std::uint64_t, 256>& hist);

// Throws std::runtime_error("blank frame") when g_max <= 0.
StretchParams compute_stretch_params(double otsu_level, double g_max);

// Stretched map in [0,1]; fills params.norm_scale.
EdgeMap contrast_stretch(const GradientMap& gmap, StretchParams& params);

// 256-level CDF equalization restricted to nonzero pixels; suppressed
// pixels stay at zero.
EdgeMap histogram_equalize(const EdgeMap& stretched);

// Intermediates captured for the debug dump.
struct EnhanceDebug {
    EdgeMap normalized;  // mag / g_max
    EdgeMap stretched;
    StretchParams params;
};

// Full enhancement chain. Propagates "blank frame" for constant inputs.
EdgeMap enhance(const GrayFrame& frame, EnhanceDebug* debug = nullptr);

// Plain g_max-normalized gradient map, the non-enhanced baseline input
// for band detection.
EdgeMap normalized_gradient(const GrayFrame& frame);

}  // namespace otx::preprocess
