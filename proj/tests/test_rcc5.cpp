#include <doctest.h>

#include "otx/rcc5.hpp"
#include "otx/rng.hpp"
#include "oracles.hpp"

using namespace otx;
using namespace otx::track;

TEST_CASE("fractional overlap basics") {
    const Rect a{0, 0, 10, 10};
    CHECK(fractional_overlap(a, a) == doctest::Approx(1.0));
    CHECK(fractional_overlap(a, Rect{50, 50, 5, 5}) == 0.0);

    const Rect big{0, 0, 20, 20};
    CHECK(fractional_overlap(a, big) == doctest::Approx(1.0));
    CHECK(fractional_overlap(big, a) == doctest::Approx(0.25));

    CHECK_THROWS_AS(fractional_overlap(Rect{0, 0, 0, 5}, a), std::invalid_argument);
}

TEST_CASE("rcc5 grid examples") {
    const Rect a{0, 0, 10, 10};
    CHECK(rcc5_classify(a, a, 0.1) == Rcc5::EQ);
    CHECK(rcc5_classify(a, Rect{0, 0, 20, 20}, 0.1) == Rcc5::PP);
    CHECK(rcc5_classify(Rect{0, 0, 20, 20}, a, 0.1) == Rcc5::PPi);
    // two 10x10 rects overlapping in a 5x10 strip: both ratios 0.5
    CHECK(rcc5_classify(a, Rect{5, 0, 10, 10}, 0.1) == Rcc5::PO);
    CHECK(rcc5_classify(a, Rect{30, 0, 10, 10}, 0.1) == Rcc5::DC);
    CHECK_THROWS_AS(rcc5_classify(a, a, 0.6), std::invalid_argument);
}

TEST_CASE("rcc5 matches the direct grid oracle on 1000 random pairs") {
    Rng rng(90210);
    auto random_rect = [&] {
        // Mix of scales so near-equal, nested and sliver overlaps all occur.
        const int x = rng.uniform_int(0, 80);
        const int y = rng.uniform_int(0, 80);
        const int w = rng.uniform_int(1, 60);
        const int h = rng.uniform_int(1, 40);
        return Rect{x, y, w, h};
    };
    int counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        Rect a = random_rect();
        Rect b = (i % 7 == 0) ? a : random_rect();
        if (i % 11 == 0) b = Rect{a.x + 1, a.y, a.w, a.h};  // near-equal
        if (i % 13 == 0) b = Rect{a.x + 2, a.y + 1, std::max(1, a.w / 2), std::max(1, a.h / 2)};
        for (double eta : {0.05, 0.1, 0.2}) {
            const Rcc5 got = rcc5_classify(a, b, eta);
            const oracle::Rel want = oracle::rcc5_grid(a, b, eta);
            CHECK(static_cast<int>(got) == static_cast<int>(want));

            // symmetry and duality
            const Rcc5 rev = rcc5_classify(b, a, eta);
            CHECK((got == Rcc5::DC) == (rev == Rcc5::DC));
            CHECK((got == Rcc5::EQ) == (rev == Rcc5::EQ));
            CHECK((got == Rcc5::PP) == (rev == Rcc5::PPi));
            CHECK((got == Rcc5::PPi) == (rev == Rcc5::PP));
            ++counts[static_cast<int>(got)];
        }
    }
    // grid totality: every class appears across the sample
    for (int c : counts) CHECK(c > 0);
}
