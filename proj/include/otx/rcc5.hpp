#pragma once

#include <stdexcept>

#include "otx/geometry.hpp"

namespace otx::track {

// RCC-5 qualitative relations between two rectangles.
enum class Rcc5 { DC, EQ, PO, PP, PPi };

// Asymmetric fractional overlap |a n b| / |a|. Throws for zero-area a.
inline double fractional_overlap(const Rect& a, const Rect& b) {
    const std::int64_t denom = area(a);
    if (denom <= 0) throw std::invalid_argument("fractional_overlap: zero-area rectangle");
    return static_cast<double>(intersection_area(a, b)) / static_cast<double>(denom);
}

// Thresholded fractional-overlap decision grid. PP(a,b) means a is
// (within tolerance) a proper part of b. eta must lie in (0, 0.5).
inline Rcc5 rcc5_classify(const Rect& a, const Rect& b, double eta) {
    if (eta <= 0.0 || eta >= 0.5) throw std::invalid_argument("rcc5_classify: eta outside (0,0.5)");
    const double gab = fractional_overlap(a, b);
    const double gba = fractional_overlap(b, a);
    const double hi = 1.0 - eta;
    if (gab <= eta && gba <= eta) return Rcc5::DC;
    if (gab >= hi && gba >= hi) return Rcc5::EQ;
    if (gab >= hi) return Rcc5::PP;
    if (gba >= hi) return Rcc5::PPi;
    return Rcc5::PO;
}

inline const char* to_string(Rcc5 rel) {
    switch (rel) {
        case Rcc5::DC: return "DC";
        case Rcc5::EQ: return "EQ";
        case Rcc5::PO: return "PO";
        case Rcc5::PP: return "PP";
        case Rcc5::PPi: return "PPi";
    }
    return "?";
}

}  // namespace otx::track
