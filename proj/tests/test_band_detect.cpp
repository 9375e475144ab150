#include <doctest.h>

#include <cmath>

#include "otx/band_detect.hpp"
#include "otx/preprocess.hpp"
#include "otx/rng.hpp"
#include "otx/synth.hpp"

using namespace otx;
using namespace otx::detect;

namespace {

EdgeMap map_of(int w, int h, float v = 0.f) {
    EdgeMap m(w, h);
    for (auto& x : m.val) x = v;
    return m;
}

EdgeMap enhanced_frame(const synth::SynthSpec& spec) {
    auto rf = synth::render_frame(spec, 0);
    return preprocess::enhance(preprocess::to_luminance(rf.image));
}

synth::SynthSpec one_band_spec(Rect r, std::uint64_t seed = 7) {
    synth::SynthSpec spec;
    spec.width = 360;
    spec.height = 288;
    spec.seed = seed;
    spec.noise_sigma = 0.04;
    spec.background = synth::Background::textured;
    synth::BandSpec band;
    band.rect = r;
    band.fg = {240, 240, 240};
    band.bg = {15, 15, 15};
    spec.bands.push_back(band);
    return spec;
}

}  // namespace

TEST_CASE("horizontal profile sums rows") {
    auto zero = map_of(10, 6);
    for (double v : horizontal_profile(zero).values) CHECK(v == 0.0);

    auto m = map_of(10, 6);
    for (int x = 0; x < 10; ++x) m.at(x, 3) = 1.f;
    auto p = horizontal_profile(m);
    CHECK(p.values[3] == doctest::Approx(10.0));
    CHECK(p.values[2] == 0.0);

    // random map vs naive double loop
    Rng rng(5);
    auto r = map_of(5, 5);
    for (auto& v : r.val) v = static_cast<float>(rng.uniform());
    auto pr = horizontal_profile(r);
    for (int y = 0; y < 5; ++y) {
        double s = 0.0;
        for (int x = 0; x < 5; ++x) s += r.at(x, y);
        CHECK(pr.values[y] == doctest::Approx(s));
    }
}

TEST_CASE("differences with boundary conventions") {
    ProjectionProfile p;
    p.values = {3, 3, 3, 3};
    auto d = differences(p);
    for (double v : d.d1) CHECK(v == 0.0);
    for (double v : d.d2) CHECK(v == 0.0);

    p.values = {0, 0, 5, 5, 0};
    d = differences(p);
    CHECK(d.d1 == std::vector<double>{0, 0, 5, 0, -5});
    CHECK(d.d2[0] == 0.0);
    CHECK(d.d2[1] == 0.0);
    CHECK(d.d2[2] == 5.0);
    CHECK(d.d2[3] == -5.0);
    CHECK(d.d2[4] == -5.0);

    // step: paired +- extrema in d2 at the step
    p.values = {0, 0, 0, 5, 5, 5};
    d = differences(p);
    CHECK(d.d2[3] == 5.0);
    CHECK(d.d2[4] == -5.0);

    p.values = {1, 2};
    CHECK_THROWS_AS(differences(p), std::invalid_argument);

    // sum of d1 telescopes
    Rng rng(11);
    p.values.clear();
    for (int i = 0; i < 40; ++i) p.values.push_back(rng.uniform() * 10);
    d = differences(p);
    double sum = 0.0;
    for (double v : d.d1) sum += v;
    CHECK(sum == doctest::Approx(p.values.back() - p.values.front()));
}

TEST_CASE("epsilon cca groups by gap") {
    std::vector<double> d1(60, 0.0);
    SUBCASE("all zeros give no labels") {
        auto la = epsilon_cca(d1, 0.5, 2);
        CHECK(la.num_labels == 0);
        for (int l : la.labels) CHECK(l == 0);
    }
    SUBCASE("gap <= epsilon merges, gap > epsilon splits") {
        for (int i : {10, 11, 12, 40, 41}) d1[i] = 3.0;
        auto la = epsilon_cca(d1, 0.5, 2);
        CHECK(la.num_labels == 2);
        CHECK(la.labels[10] == 1);
        CHECK(la.labels[12] == 1);
        CHECK(la.labels[40] == 2);
    }
    SUBCASE("gap of 3 exceeds epsilon 2") {
        d1[10] = 3.0;
        d1[13] = -3.0;
        auto la = epsilon_cca(d1, 0.5, 2);
        CHECK(la.num_labels == 2);
    }
}

TEST_CASE("local mean filter keeps only values above the label mean") {
    std::vector<double> d2(10, 0.0);
    LabelArray la;
    la.labels.assign(10, 0);
    SUBCASE("single label, one survivor") {
        d2[3] = 2;
        d2[4] = 2;
        d2[5] = 8;
        la.labels[3] = la.labels[4] = la.labels[5] = 1;
        la.num_labels = 1;
        auto f = local_mean_filter(d2, la);
        CHECK(f[3] == 0.0);  // label mean of |d2| is 4
        CHECK(f[4] == 0.0);
        CHECK(f[5] == 8.0);
    }
    SUBCASE("constant magnitudes all zeroed") {
        d2[3] = d2[4] = d2[5] = -4;
        la.labels[3] = la.labels[4] = la.labels[5] = 1;
        la.num_labels = 1;
        auto f = local_mean_filter(d2, la);
        for (double v : f) CHECK(v == 0.0);
    }
    SUBCASE("no labels give all zeros") {
        d2[2] = 9;
        auto f = local_mean_filter(d2, la);
        for (double v : f) CHECK(v == 0.0);
    }
}

TEST_CASE("locate lines per label") {
    std::vector<double> d2(30, 0.0);
    LabelArray la;
    la.labels.assign(30, 0);

    SUBCASE("argmin of the filtered second difference") {
        d2[20] = 0;
        d2[21] = -9;
        d2[22] = -3;
        la.labels[20] = la.labels[21] = la.labels[22] = 1;
        la.num_labels = 1;
        auto f = local_mean_filter(d2, la);
        auto lines = locate_lines(f, d2, la);
        REQUIRE(lines.size() == 1);
        CHECK(lines[0] == 21);
    }
    SUBCASE("degenerate tie falls back to the raw argmin") {
        d2[10] = -5;
        d2[11] = -5;
        la.labels[10] = la.labels[11] = 1;
        la.num_labels = 1;
        auto f = local_mean_filter(d2, la);  // nothing survives
        auto lines = locate_lines(f, d2, la);
        REQUIRE(lines.size() == 1);
        CHECK(lines[0] == 10);  // raw tie, smaller index wins
    }
    SUBCASE("two labels give two strictly increasing lines") {
        d2[5] = -4;
        d2[6] = -1;
        la.labels[5] = la.labels[6] = 1;
        d2[18] = -2;
        d2[19] = -7;
        la.labels[18] = la.labels[19] = 2;
        la.num_labels = 2;
        auto f = local_mean_filter(d2, la);
        auto lines = locate_lines(f, d2, la);
        REQUIRE(lines.size() == 2);
        CHECK(lines[0] < lines[1]);
    }
}

TEST_CASE("line count equals label count on a clean two-step profile") {
    ProjectionProfile p;
    p.values.assign(60, 0.0);
    for (int i = 20; i < 40; ++i) p.values[i] = 30.0;
    auto d = differences(p);
    const double prom = prominence_threshold(d.d1);
    auto la = epsilon_cca(d.d1, prom, 2);
    auto f = local_mean_filter(d.d2, la);
    auto lines = locate_lines(f, d.d2, la);
    CHECK(static_cast<int>(lines.size()) == la.num_labels);
    CHECK(la.num_labels == 2);
}

TEST_CASE("detect_bands on a blank map is empty") {
    CHECK(detect_bands(map_of(64, 64)).empty());
    CHECK(detect_bands(map_of(2, 2)).empty());
}

TEST_CASE("detect_bands finds a single synthetic band within 2 px per side") {
    const Rect gt{60, 120, 220, 36};
    auto edge = enhanced_frame(one_band_spec(gt));
    auto bands = detect_bands(edge);
    REQUIRE(bands.size() == 1);
    const Rect r = bands[0].rect;
    CHECK(std::abs(r.x - gt.x) <= 2);
    CHECK(std::abs(r.y - gt.y) <= 2);
    CHECK(std::abs(r.x + r.w - gt.x - gt.w) <= 2);
    CHECK(std::abs(r.y + r.h - gt.y - gt.h) <= 2);
    CHECK(bands[0].density > 0.0);
}

TEST_CASE("detect_bands separates stacked bands and keeps rects disjoint") {
    auto spec = one_band_spec(Rect{50, 80, 200, 32});
    synth::BandSpec second;
    second.rect = Rect{90, 150, 180, 30};  // 38 blank rows between bands
    second.fg = {245, 245, 245};
    second.bg = {20, 20, 20};
    spec.bands.push_back(second);
    auto edge = enhanced_frame(spec);
    auto bands = detect_bands(edge);
    REQUIRE(bands.size() == 2);
    CHECK(intersection_area(bands[0].rect, bands[1].rect) == 0);
    CHECK(bands[0].rect.y < bands[1].rect.y);
}

TEST_CASE("detect_bands invariants: in bounds, deterministic, sorted, disjoint") {
    Rng rng(404);
    for (int trial = 0; trial < 6; ++trial) {
        auto spec =
            synth::random_detection_spec(rng, 360, 288, 0.05, synth::Background::textured, 1, 3);
        auto edge = enhanced_frame(spec);
        auto a = detect_bands(edge);
        auto b = detect_bands(edge);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].rect == b[i].rect);
            CHECK(a[i].rect.x >= 0);
            CHECK(a[i].rect.y >= 0);
            CHECK(a[i].rect.x + a[i].rect.w <= edge.width);
            CHECK(a[i].rect.y + a[i].rect.h <= edge.height);
            for (std::size_t j = 0; j < i; ++j)
                CHECK(intersection_area(a[i].rect, a[j].rect) == 0);
            if (i > 0) {
                const bool sorted = a[i - 1].rect.y < a[i].rect.y ||
                                    (a[i - 1].rect.y == a[i].rect.y &&
                                     a[i - 1].rect.x <= a[i].rect.x);
                CHECK(sorted);
            }
        }
    }
}

TEST_CASE("detect_bands is scale invariant") {
    // No fixed magnitude thresholds anywhere: scaling the map must not
    // change the result.
    auto edge = enhanced_frame(one_band_spec(Rect{70, 100, 200, 34}, 21));
    auto base = detect_bands(edge);
    REQUIRE(!base.empty());
    for (float c : {0.25f, 3.0f}) {
        EdgeMap scaled = edge;
        for (auto& v : scaled.val) v *= c;
        auto got = detect_bands(scaled);
        REQUIRE(got.size() == base.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].rect == base[i].rect);
    }
}

TEST_CASE("detect_bands translation covariance") {
    const Rect gt{60, 100, 220, 36};
    auto base = detect_bands(enhanced_frame(one_band_spec(gt, 33)));
    REQUIRE(base.size() == 1);

    const int k = 5;
    auto moved =
        detect_bands(enhanced_frame(one_band_spec(Rect{gt.x, gt.y + k, gt.w, gt.h}, 33)));
    REQUIRE(moved.size() == 1);
    CHECK(std::abs(moved[0].rect.y - base[0].rect.y - k) <= 1);
    CHECK(std::abs(moved[0].rect.h - base[0].rect.h) <= 2);
}
