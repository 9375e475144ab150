#include <doctest.h>

#include "otx/preprocess.hpp"
#include "otx/rng.hpp"
#include "otx/synth.hpp"
#include "oracles.hpp"

using namespace otx;
using namespace otx::preprocess;

namespace {

ColorImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    ColorImage img(w, h);
    for (int i = 0; i < w * h; ++i) {
        img.rgb[3 * i] = r;
        img.rgb[3 * i + 1] = g;
        img.rgb[3 * i + 2] = b;
    }
    return img;
}

}  // namespace

TEST_CASE("to_luminance basics") {
    CHECK_THROWS_AS(to_luminance(ColorImage(2, 5)), std::invalid_argument);

    auto black = to_luminance(solid(4, 4, 0, 0, 0));
    for (float v : black.lum) CHECK(v == 0.f);

    auto white = to_luminance(solid(4, 4, 255, 255, 255));
    for (float v : white.lum) CHECK(v == doctest::Approx(1.0));

    auto red = to_luminance(solid(4, 4, 255, 0, 0));
    CHECK(red.at(1, 1) == doctest::Approx(0.299));
}

TEST_CASE("scharr gradient: constant frame is all zero") {
    GrayFrame f(8, 8);
    for (auto& v : f.lum) v = 0.37f;
    auto g = scharr_gradient(f);
    CHECK(g.g_max == 0.f);
    for (float m : g.mag) CHECK(m == 0.f);
}

TEST_CASE("scharr gradient matches direct convolution on a vertical step") {
    GrayFrame f(10, 6);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 10; ++x) f.at(x, y) = x >= 5 ? 1.f : 0.f;
    auto g = scharr_gradient(f);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 10; ++x)
            CHECK(g.at(x, y) == doctest::Approx(oracle::scharr_at(f, x, y)).epsilon(1e-5));
    // Edge columns carry the mass.
    CHECK(g.at(4, 3) > 0.f);
    CHECK(g.at(5, 3) > 0.f);
    CHECK(g.at(1, 3) == 0.f);
}

TEST_CASE("scharr gradient is isotropic under transposition") {
    Rng rng(77);
    GrayFrame f(9, 7);
    for (auto& v : f.lum) v = static_cast<float>(rng.uniform());
    GrayFrame ft(7, 9);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x) ft.at(y, x) = f.at(x, y);
    auto g = scharr_gradient(f);
    auto gt = scharr_gradient(ft);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x)
            CHECK(g.at(x, y) == doctest::Approx(gt.at(y, x)).epsilon(1e-5));
}

TEST_CASE("otsu threshold separates two delta peaks") {
    std::array<std::uint64_t, 256> hist{};
    hist[10] = 500;
    hist[200] = 300;
    const double t = otsu_threshold(hist);
    CHECK(t >= 10.0 / 256.0);
    CHECK(t < 200.0 / 256.0);
    CHECK(t == oracle::exhaustive_otsu(hist));
}

TEST_CASE("otsu threshold on a uniform histogram equals the exhaustive oracle") {
    std::array<std::uint64_t, 256> hist{};
    hist.fill(7);
    CHECK(otsu_threshold(hist) == oracle::exhaustive_otsu(hist));
}

TEST_CASE("otsu threshold degenerate single peak returns the bin center") {
    std::array<std::uint64_t, 256> hist{};
    hist[42] = 1234;
    CHECK(otsu_threshold(hist) == doctest::Approx((42 + 0.5) / 256.0));
    CHECK_THROWS_AS(otsu_threshold(std::array<std::uint64_t, 256>{}), std::invalid_argument);
}

TEST_CASE("otsu equals exhaustive search on 50 random histograms") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<std::uint64_t, 256> hist{};
        const int modes = rng.uniform_int(1, 4);
        for (int m = 0; m < modes; ++m) {
            const int center = rng.uniform_int(0, 255);
            const int spread = rng.uniform_int(1, 40);
            const int mass = rng.uniform_int(50, 5000);
            for (int k = 0; k < mass; ++k) {
                int b = center + static_cast<int>(rng.normal(0.0, spread));
                b = std::clamp(b, 0, 255);
                ++hist[b];
            }
        }
        CHECK(otsu_threshold(hist) == oracle::exhaustive_otsu(hist));
    }
}

TEST_CASE("stretch parameters") {
    SUBCASE("alpha from the closed form") {
        auto p = compute_stretch_params(0.25, 1.0);
        CHECK(p.alpha == doctest::Approx(2.0));
        CHECK(p.suppress_floor == doctest::Approx(0.25));
    }
    SUBCASE("zero threshold clamps to the minimum stretch") {
        auto p = compute_stretch_params(0.0, 5.0);
        CHECK(p.alpha == doctest::Approx(kAlphaMin));
        CHECK(p.alpha > 1.0);
    }
    SUBCASE("high threshold") {
        auto p = compute_stretch_params(0.49, 2.0);
        CHECK(p.alpha == doctest::Approx(50.0));
        CHECK(p.suppress_floor == doctest::Approx(0.49));
    }
    SUBCASE("cap for degenerate thresholds") {
        CHECK(compute_stretch_params(0.499, 1.0).alpha == doctest::Approx(kAlphaMax));
        CHECK(compute_stretch_params(0.7, 1.0).alpha == doctest::Approx(kAlphaMax));
    }
    SUBCASE("blank frame") {
        CHECK_THROWS_WITH(compute_stretch_params(0.2, 0.0), "blank frame");
    }
}

TEST_CASE("contrast stretch suppresses the floor and rescales the peak") {
    GradientMap g;
    g.width = 3;
    g.height = 1;
    g.mag = {0.25f, 0.5f, 1.f};  // normalized values 0.25, 0.5, 1.0
    g.g_max = 1.f;
    auto p = compute_stretch_params(0.25, 1.0);  // alpha = 2
    auto s = contrast_stretch(g, p);
    CHECK(p.norm_scale == doctest::Approx(1.5));
    CHECK(s.val[0] == 0.f);                          // exactly at the floor
    CHECK(s.val[1] == doctest::Approx(0.5 / 1.5));   // midpoint scaled by the peak
    CHECK(s.val[2] == doctest::Approx(1.0));
}

TEST_CASE("stretch zeroing never loses zeros and suppression is monotone") {
    Rng rng(99);
    GradientMap g;
    g.width = 64;
    g.height = 8;
    g.mag.resize(64 * 8);
    for (auto& m : g.mag) m = static_cast<float>(rng.uniform());
    g.mag[5] = 0.f;
    g.mag[100] = 1.f;
    g.g_max = 1.f;

    std::size_t zeros_before = 0;
    for (float m : g.mag)
        if (m == 0.f) ++zeros_before;

    auto hist = gradient_histogram(g);
    auto p = compute_stretch_params(otsu_threshold(hist), g.g_max);
    auto s = contrast_stretch(g, p);

    std::size_t zeros_after = 0;
    for (std::size_t i = 0; i < s.val.size(); ++i) {
        if (s.val[i] == 0.f) ++zeros_after;
        if (g.mag[i] / g.g_max < p.suppress_floor) CHECK(s.val[i] == 0.f);
    }
    CHECK(zeros_after >= zeros_before);

    // Monotone: sort pixel pairs by raw magnitude, enhanced order must agree.
    auto e = histogram_equalize(s);
    for (std::size_t i = 1; i < g.mag.size(); ++i)
        for (std::size_t j = 0; j < i; j += 17) {
            if (g.mag[j] < g.mag[i]) CHECK(e.val[j] <= e.val[i]);
            if (g.mag[j] > g.mag[i]) CHECK(e.val[j] >= e.val[i]);
        }
}

TEST_CASE("histogram equalization maps levels onto their CDF") {
    EdgeMap m(10, 10);
    // 25% at 0.3, 75% at 0.9
    for (int i = 0; i < 100; ++i) m.val[i] = i < 25 ? 0.3f : 0.9f;
    auto e = histogram_equalize(m);
    for (int i = 0; i < 100; ++i)
        CHECK(e.val[i] == doctest::Approx(i < 25 ? 0.25 : 1.0));
}

TEST_CASE("histogram equalization keeps zeros at zero") {
    EdgeMap m(8, 4);
    for (std::size_t i = 0; i < m.val.size(); ++i) m.val[i] = (i % 3 == 0) ? 0.f : 0.6f;
    auto e = histogram_equalize(m);
    for (std::size_t i = 0; i < m.val.size(); ++i) {
        if (m.val[i] == 0.f) CHECK(e.val[i] == 0.f);
    }

    EdgeMap all_zero(5, 5);
    auto ez = histogram_equalize(all_zero);
    for (float v : ez.val) CHECK(v == 0.f);
}

TEST_CASE("equalization of a uniform nonzero spread is near identity") {
    EdgeMap m(16, 16);
    for (int i = 0; i < 256; ++i) m.val[i] = (i + 1) / 256.f;
    auto e = histogram_equalize(m);
    for (int i = 0; i < 256; ++i) CHECK(std::abs(e.val[i] - m.val[i]) <= 1.f / 256.f + 1e-6f);
}

TEST_CASE("enhance rejects constant frames") {
    GrayFrame f(16, 16);
    for (auto& v : f.lum) v = 0.5f;
    CHECK_THROWS_WITH(enhance(f), "blank frame");
}

TEST_CASE("enhance concentrates edge mass inside the text box") {
    // White text box on gray with a low-amplitude sinusoid behind it.
    const int w = 160, h = 120;
    GrayFrame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = 0.5f + 0.04f * std::sin(x * 0.23f) * std::sin(y * 0.19f);
    const Rect box{40, 40, 60, 24};
    for (int y = box.y; y < box.y + box.h; ++y)
        for (int x = box.x; x < box.x + box.w; ++x)
            if ((x / 3) % 2 == 0) f.at(x, y) = 1.f;

    auto g = scharr_gradient(f);
    auto e = enhance(f);

    auto mass_fraction = [&](auto&& value_at) {
        double inside = 0.0, total = 0.0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double v = value_at(x, y);
                total += v;
                const bool in = x >= box.x - 2 && x < box.x + box.w + 2 && y >= box.y - 2 &&
                                y < box.y + box.h + 2;
                if (in) inside += v;
            }
        return inside / total;
    };
    const double raw_frac = mass_fraction([&](int x, int y) { return g.at(x, y); });
    const double enh_frac = mass_fraction([&](int x, int y) { return e.at(x, y); });
    CHECK(enh_frac > raw_frac);
}

TEST_CASE("enhanced CDF separates text from non-text regions on synth frames") {
    Rng rng(4242);
    double text_below = 0.0, nontext_below = 0.0;
    std::uint64_t text_n = 0, nontext_n = 0;
    for (int trial = 0; trial < 5; ++trial) {
        auto spec = synth::random_detection_spec(rng, 360, 288, 0.05,
                                                 synth::Background::textured, 1, 3);
        auto frame = synth::render_frame(spec, 0);
        auto e = enhance(to_luminance(frame.image));
        for (int y = 0; y < e.height; ++y)
            for (int x = 0; x < e.width; ++x) {
                bool in_text = false;
                for (const auto& b : frame.gt.bands) {
                    if (x >= b.rect.x && x < b.rect.x + b.rect.w && y >= b.rect.y &&
                        y < b.rect.y + b.rect.h) {
                        in_text = true;
                        break;
                    }
                }
                const bool below = e.at(x, y) < 0.6f;
                if (in_text) {
                    text_below += below;
                    ++text_n;
                } else {
                    nontext_below += below;
                    ++nontext_n;
                }
            }
    }
    const double gap = nontext_below / nontext_n - text_below / text_n;
    CHECK(gap > 0.2);
}
