#include "otx/synth.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "otx/errors.hpp"
#include "otx/image_io.hpp"

namespace otx::synth {

using json = nlohmann::json;

double band_luminance(const std::array<std::uint8_t, 3>& c) {
    return (0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]) / 255.0;
}

void validate(const SynthSpec& spec) {
    if (spec.width < 16 || spec.height < 16) throw config_error("synth: frame too small");
    if (spec.frames < 1) throw config_error("synth: frames must be >= 1");
    if (spec.noise_sigma < 0.0 || spec.noise_sigma > 0.2)
        throw config_error("synth: noise_sigma outside [0, 0.2]");
    for (const auto& b : spec.bands) {
        if (b.rect.w <= 0 || b.rect.h <= 0 || b.rect.x < 0 || b.rect.y < 0 ||
            b.rect.x + b.rect.w > spec.width || b.rect.y + b.rect.h > spec.height)
            throw config_error("synth: band rect outside frame");
        if (std::abs(band_luminance(b.fg) - band_luminance(b.bg)) < 0.3)
            throw config_error("synth: fg/bg luminance contrast below 0.3");
        if (b.end < b.start) throw config_error("synth: band end before start");
    }
}

namespace {

Background background_from_string(const std::string& s) {
    if (s == "flat") return Background::flat;
    if (s == "textured") return Background::textured;
    if (s == "photo") return Background::photo;
    throw config_error("synth: unknown background '" + s + "'");
}

std::array<std::uint8_t, 3> color_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw config_error("synth: color must be [r,g,b]");
    std::array<std::uint8_t, 3> c{};
    for (int i = 0; i < 3; ++i) {
        int v = j[i].get<int>();
        if (v < 0 || v > 255) throw config_error("synth: color channel outside [0,255]");
        c[i] = static_cast<std::uint8_t>(v);
    }
    return c;
}

inline std::uint8_t to_byte(double v) {
    if (v <= 0.0) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(v * 255.0 + 0.5);
}

void fill_rect(ColorImage& img, const Rect& r, const std::array<std::uint8_t, 3>& c) {
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) {
            std::uint8_t* p = img.px(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        }
}

// Dense vertical stroke texture, the signal shape dense overlay typography
// leaves in an enhanced edge map. 2 px strokes on a 2 px pitch keep every
// column of the block lit under a 3x3 gradient, so the block reads as one
// solid slab; wider strokes or gaps would cut dark seams into it and split
// the band. The layout is a function of (seed, band index) only, so it is
// static over a track. density < 1 turns a share of strokes half-height,
// an ascender/descender-like ripple.
void render_glyphs(ColorImage& img, const BandSpec& band, Rng rng) {
    const Rect& r = band.rect;
    if (r.w <= 4 || r.h <= 2) return;
    // Strokes run flush to the band rect; the band boundary in the edge map
    // then coincides with the strongest stroke edges.
    const int ty0 = r.y;
    const int ty1 = r.y + r.h;
    // Below density 0.5 the texture degrades into a detection stressor.
    const double half_height_share = std::clamp(0.5 - band.density, 0.0, 0.5) * 0.3;

    int x = r.x;
    const int x_end = r.x + r.w;
    while (x < x_end) {
        const int x1 = std::min(x + 2, x_end);
        const bool half = rng.uniform() < half_height_share;
        const int y1 = half ? ty0 + std::max(2, (ty1 - ty0) * 2 / 3) : ty1;
        fill_rect(img, Rect{x, ty0, x1 - x, y1 - ty0}, band.fg);
        x = x1 + 2;
    }
}

void render_background(ColorImage& img, const SynthSpec& spec) {
    const int w = spec.width;
    const int h = spec.height;
    switch (spec.background) {
        case Background::flat: {
            fill_rect(img, Rect{0, 0, w, h}, {128, 128, 128});
            break;
        }
        case Background::textured: {
            Rng rng = Rng::derive(spec.seed, 0x7e37);
            const double base = rng.uniform(0.42, 0.55);
            const double amp = rng.uniform(0.04, 0.08);
            const double wx = 2.0 * M_PI / rng.uniform(48.0, 96.0);
            const double wy = 2.0 * M_PI / rng.uniform(48.0, 96.0);
            const double px = rng.uniform(0.0, 2.0 * M_PI);
            const double py = rng.uniform(0.0, 2.0 * M_PI);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double v = base + amp * std::sin(wx * x + px) * std::sin(wy * y + py);
                    std::uint8_t* p = img.px(x, y);
                    p[0] = p[1] = p[2] = to_byte(v);
                }
            break;
        }
        case Background::photo: {
            Rng rng = Rng::derive(spec.seed, 0xb10b);
            fill_rect(img, Rect{0, 0, w, h},
                      {to_byte(rng.uniform(0.3, 0.7)), to_byte(rng.uniform(0.3, 0.7)),
                       to_byte(rng.uniform(0.3, 0.7))});
            // Sharp-edged clutter plus finely textured patches: dense
            // moderate-contrast edges that plain edge-density profiles
            // confuse with text but contrast enhancement suppresses.
            const int blobs = rng.uniform_int(30, 50);
            for (int i = 0; i < blobs; ++i) {
                const int bw = rng.uniform_int(20, 160);
                const int bh = rng.uniform_int(20, 120);
                const int bx = rng.uniform_int(0, std::max(0, w - bw));
                const int by = rng.uniform_int(0, std::max(0, h - bh));
                const double l = rng.uniform(0.15, 0.85);
                const double spread = rng.uniform(-0.1, 0.1);
                fill_rect(img, Rect{bx, by, bw, bh},
                          {to_byte(l + spread), to_byte(l), to_byte(l - spread)});
            }
            const int patches = rng.uniform_int(5, 8);
            for (int i = 0; i < patches; ++i) {
                const int pw = rng.uniform_int(40, 120);
                const int ph = rng.uniform_int(20, 60);
                const int px = rng.uniform_int(0, std::max(0, w - pw));
                const int py = rng.uniform_int(0, std::max(0, h - ph));
                const double base = rng.uniform(0.35, 0.6);
                const double amp = rng.uniform(0.10, 0.16);
                for (int x = px; x < px + pw; x += 4)
                    fill_rect(img, Rect{x, py, std::min(2, px + pw - x), ph},
                              {to_byte(base + amp), to_byte(base + amp), to_byte(base + amp)});
                for (int x = px + 2; x < px + pw; x += 4)
                    fill_rect(img, Rect{x, py, std::min(2, px + pw - x), ph},
                              {to_byte(base - amp), to_byte(base - amp), to_byte(base - amp)});
            }
            break;
        }
    }
}

}  // namespace

SynthSpec spec_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open spec " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("synth spec parse error: " + std::string(e.what()));
    }
    SynthSpec spec;
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.frames = j.value("frames", spec.frames);
    spec.seed = j.value("seed", spec.seed);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    if (j.contains("background")) spec.background = background_from_string(j["background"]);
    if (j.contains("bands")) {
        for (const auto& jb : j["bands"]) {
            BandSpec b;
            b.rect = Rect{jb.at("x").get<int>(), jb.at("y").get<int>(), jb.at("w").get<int>(),
                          jb.at("h").get<int>()};
            if (jb.contains("fg")) b.fg = color_from_json(jb["fg"]);
            if (jb.contains("bg")) b.bg = color_from_json(jb["bg"]);
            b.density = jb.value("density", b.density);
            b.start = jb.value("start", 0);
            b.end = jb.value("end", spec.frames - 1);
            b.text = jb.value("text", std::string{});
            spec.bands.push_back(b);
        }
    }
    validate(spec);
    return spec;
}

RenderedFrame render_frame(const SynthSpec& spec, int index) {
    RenderedFrame out;
    out.image = ColorImage(spec.width, spec.height);
    out.gt.frame = index;

    render_background(out.image, spec);

    for (std::size_t bi = 0; bi < spec.bands.size(); ++bi) {
        const BandSpec& band = spec.bands[bi];
        if (index < band.start || index > band.end) continue;
        fill_rect(out.image, band.rect, band.bg);
        render_glyphs(out.image, band, Rng::derive(spec.seed, 0x6100 + bi));
        out.gt.bands.push_back(GtBand{band.rect, static_cast<int>(bi), band.text});
    }

    if (spec.noise_sigma > 0.0) {
        Rng rng = Rng::derive(spec.seed, 0x4015e + static_cast<std::uint64_t>(index) * 3);
        for (auto& v : out.image.rgb) {
            const double n = rng.normal(0.0, spec.noise_sigma * 255.0);
            double val = v + n;
            v = to_byte(val / 255.0);
        }
    }
    return out;
}

void render_sequence(const SynthSpec& spec, const std::filesystem::path& outdir,
                     const std::string& format) {
    validate(spec);
    if (format != "ppm" && format != "png") throw config_error("synth: format must be ppm or png");
    std::filesystem::create_directories(outdir);
    std::ofstream gt(outdir / "gt.jsonl");
    if (!gt) throw io_error("cannot write gt.jsonl in " + outdir.string());

    char name[32];
    for (int i = 0; i < spec.frames; ++i) {
        RenderedFrame f = render_frame(spec, i);
        std::snprintf(name, sizeof(name), "frame_%06d.%s", i, format.c_str());
        if (format == "png")
            io::write_png(outdir / name, f.image);
        else
            io::write_ppm(outdir / name, f.image);

        json bands = json::array();
        for (const auto& b : f.gt.bands) {
            json jb = {{"x", b.rect.x}, {"y", b.rect.y}, {"w", b.rect.w},
                       {"h", b.rect.h}, {"track_id", b.track_id}};
            if (!b.text.empty()) jb["text"] = b.text;
            bands.push_back(jb);
        }
        gt << json{{"frame", i}, {"bands", bands}}.dump() << "\n";
    }
}

namespace {

// Dark or bright band background, strongly separated from the mid-gray
// scene backgrounds, with an opposing foreground. The narrow luminance
// ranges keep fg/bg contrast (and so the equalized band level) comparable
// across bands of one frame.
void pick_band_colors(Rng& rng, BandSpec& band) {
    const bool dark_bg = rng.uniform() < 0.5;
    const double bg_l = dark_bg ? rng.uniform(0.04, 0.07) : rng.uniform(0.93, 0.96);
    const double fg_l = dark_bg ? rng.uniform(0.92, 0.96) : rng.uniform(0.04, 0.08);
    auto tint = [&](double l) {
        std::array<std::uint8_t, 3> c;
        const double spread = rng.uniform(-0.04, 0.04);
        c[0] = to_byte(l + spread);
        c[1] = to_byte(l);
        c[2] = to_byte(l - spread);
        return c;
    };
    band.bg = tint(bg_l);
    band.fg = tint(fg_l);
}

// Overlay bands sit inside the title-safe area, well away from frame borders.
Rect place_band(Rng& rng, int width, int height, const std::vector<Rect>& taken) {
    const int safe = 24;
    for (int attempt = 0; attempt < 200; ++attempt) {
        const int h = rng.uniform_int(26, 46);
        const int w = 2 * rng.uniform_int(90, 190);  // even width, splits cleanly in half
        if (w > width - 2 * safe || h > height - 2 * safe) continue;
        const int x = rng.uniform_int(safe, width - w - safe);
        const int y = rng.uniform_int(safe, height - h - safe);
        const Rect r{x, y, w, h};
        // Bands are stacked like real lower-thirds: row ranges stay disjoint
        // with clearance, since row profiles segment the frame by rows first.
        bool clear = true;
        for (const Rect& t : taken) {
            if (y < t.y + t.h + 16 && t.y < y + h + 16) {
                clear = false;
                break;
            }
        }
        if (clear) return r;
    }
    return Rect{};
}

}  // namespace

SynthSpec random_detection_spec(Rng& rng, int width, int height, double noise_sigma,
                                Background background, int min_bands, int max_bands) {
    SynthSpec spec;
    spec.width = width;
    spec.height = height;
    spec.frames = 1;
    spec.seed = rng.next_u64();
    spec.noise_sigma = noise_sigma;
    spec.background = background;
    const int n = rng.uniform_int(min_bands, max_bands);
    std::vector<Rect> taken;
    for (int i = 0; i < n; ++i) {
        const Rect r = place_band(rng, width, height, taken);
        if (area(r) == 0) continue;
        taken.push_back(r);
        BandSpec band;
        band.rect = r;
        pick_band_colors(rng, band);
        spec.bands.push_back(band);
    }
    return spec;
}

SynthSpec random_tracking_spec(Rng& rng, int width, int height, int frames, int num_bands) {
    SynthSpec spec;
    spec.width = width;
    spec.height = height;
    spec.frames = frames;
    spec.seed = rng.next_u64();
    spec.noise_sigma = 0.05;
    spec.background = Background::textured;
    std::vector<Rect> taken;
    for (int i = 0; i < num_bands; ++i) {
        const Rect r = place_band(rng, width, height, taken);
        if (area(r) == 0) continue;
        taken.push_back(r);
        BandSpec band;
        band.rect = r;
        pick_band_colors(rng, band);
        if (i == 0) {
            band.start = 0;  // anchor band keeps every frame non-empty
            band.end = frames - 1;
        } else {
            band.start = rng.uniform_int(0, frames / 3);
            band.end = rng.uniform_int(2 * frames / 3, frames - 1);
        }
        spec.bands.push_back(band);
    }
    return spec;
}

}  // namespace otx::synth
