#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "otx/image.hpp"
#include "otx/rng.hpp"

namespace otx::synth {

enum class Background { flat, textured, photo };

struct BandSpec {
    Rect rect;
    std::array<std::uint8_t, 3> fg{235, 235, 235};
    std::array<std::uint8_t, 3> bg{24, 24, 96};
    double density = 0.7;  // glyph-block packing proxy; lower = wider word gaps
    int start = 0;         // first frame the band is shown
    int end = std::numeric_limits<int>::max();  // last frame (inclusive)
    std::string text;      // optional reference transcript carried into GT
};

struct SynthSpec {
    int width = 720;
    int height = 576;
    int frames = 1;
    std::uint64_t seed = 1;
    double noise_sigma = 0.05;
    Background background = Background::textured;
    std::vector<BandSpec> bands;
};

struct GtBand {
    Rect rect;
    int track_id = 0;
    std::string text;
};

struct GtFrame {
    int frame = 0;
    std::vector<GtBand> bands;
};

struct RenderedFrame {
    ColorImage image;
    GtFrame gt;
};

// Throws config_error when rects leave the frame or fg/bg contrast is
// below the 0.3 luminance floor.
void validate(const SynthSpec& spec);

SynthSpec spec_from_json_file(const std::filesystem::path& path);

// Pure function of (spec, index): backgrounds and glyph layouts depend only
// on spec.seed, per-frame noise on (spec.seed, index).
RenderedFrame render_frame(const SynthSpec& spec, int index);

// Writes frame_%06d.<ext> plus gt.jsonl into outdir. format: "ppm" or "png".
void render_sequence(const SynthSpec& spec, const std::filesystem::path& outdir,
                     const std::string& format = "ppm");

// Randomized single-frame spec for detection corpora.
SynthSpec random_detection_spec(Rng& rng, int width, int height, double noise_sigma,
                                Background background, int min_bands, int max_bands);

// Randomized multi-band schedule with staggered entries/exits for tracking
// sequences; at least one band is active on every frame.
SynthSpec random_tracking_spec(Rng& rng, int width, int height, int frames, int num_bands);

double band_luminance(const std::array<std::uint8_t, 3>& c);

}  // namespace otx::synth
