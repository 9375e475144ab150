// Independent reference implementations used to freeze expected values.
// Everything here is deliberately naive and kept apart from the library code
// paths it checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "otx/geometry.hpp"
#include "otx/image.hpp"

namespace oracle {

// Direct 3x3 Scharr convolution with replicate borders, double precision.
inline double scharr_at(const otx::GrayFrame& f, int x, int y) {
    auto sample = [&](int sx, int sy) {
        sx = std::clamp(sx, 0, f.width - 1);
        sy = std::clamp(sy, 0, f.height - 1);
        return static_cast<double>(f.at(sx, sy));
    };
    const double gx = 3.0 * (sample(x + 1, y - 1) - sample(x - 1, y - 1)) +
                      10.0 * (sample(x + 1, y) - sample(x - 1, y)) +
                      3.0 * (sample(x + 1, y + 1) - sample(x - 1, y + 1));
    const double gy = 3.0 * (sample(x - 1, y + 1) - sample(x - 1, y - 1)) +
                      10.0 * (sample(x, y + 1) - sample(x, y - 1)) +
                      3.0 * (sample(x + 1, y + 1) - sample(x + 1, y - 1));
    return std::sqrt(gx * gx + gy * gy);
}

// Exhaustive between-class-variance search over all 256 split points,
// class 0 = bins [0..t]. Ties toward the lower t. Single populated bin
// returns that bin's center.
inline double exhaustive_otsu(const std::array<std::uint64_t, 256>& hist) {
    std::uint64_t total = 0;
    int populated = 0, only = 0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        if (hist[i]) {
            ++populated;
            only = i;
        }
    }
    if (populated == 1) return (only + 0.5) / 256.0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        std::uint64_t n0 = 0;
        double s0 = 0.0;
        for (int i = 0; i <= t; ++i) {
            n0 += hist[i];
            s0 += static_cast<double>(hist[i]) * i;
        }
        const std::uint64_t n1 = total - n0;
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

// Table-driven RCC-5 grid straight from the thresholded overlap ratios.
enum class Rel { DC, EQ, PO, PP, PPi };

inline Rel rcc5_grid(const otx::Rect& a, const otx::Rect& b, double eta) {
    const double gab = static_cast<double>(otx::intersection_area(a, b)) /
                       static_cast<double>(otx::area(a));
    const double gba = static_cast<double>(otx::intersection_area(a, b)) /
                       static_cast<double>(otx::area(b));
    const int row = gab <= eta ? 0 : (gab >= 1.0 - eta ? 2 : 1);
    const int col = gba <= eta ? 0 : (gba >= 1.0 - eta ? 2 : 1);
    static const Rel grid[3][3] = {
        {Rel::DC, Rel::PO, Rel::PPi},
        {Rel::PO, Rel::PO, Rel::PPi},
        {Rel::PP, Rel::PP, Rel::EQ},
    };
    return grid[row][col];
}

// Plain recursive-with-memo edit distance, independent of the library DP.
inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::vector<std::size_t>> memo(a.size() + 1,
                                               std::vector<std::size_t>(b.size() + 1, SIZE_MAX));
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        if (memo[i][j] != SIZE_MAX) return memo[i][j];
        std::size_t best = std::min(self(self, i - 1, j), self(self, i, j - 1)) + 1;
        const std::size_t sub = self(self, i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
        best = std::min(best, sub);
        return memo[i][j] = best;
    };
    return rec(rec, a.size(), b.size());
}

}  // namespace oracle
