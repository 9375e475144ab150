#pragma once

#include <span>
#include <vector>

#include "otx/image.hpp"

namespace otx::detect {

enum class Axis { horizontal, vertical };

// Per-row (horizontal) or per-column (vertical) sums of the edge map.
struct ProjectionProfile {
    std::vector<double> values;
    Axis axis = Axis::horizontal;
};

// First and second differences of a profile. d1[0] = d2[0] = d2[1] = 0.
struct DifferenceProfile {
    std::vector<double> d1;
    std::vector<double> d2;
};

// 1-D connected-component labels over prominent indices; 0 = unlabeled,
// component ids are 1..num_labels in increasing index order.
struct LabelArray {
    std::vector<int> labels;
    int num_labels = 0;
};

struct TextBand {
    Rect rect;
    double density = 0.0;  // mean edge value inside rect
};

struct DetectParams {
    int epsilon = 2;       // max index gap inside one component
    int min_band_w = 16;
    int min_band_h = 8;
};

// Captured intermediates for the per-frame debug dump.
struct DetectDebug {
    std::vector<double> horizontal_profile;
    std::vector<int> horizontal_labels;
    std::vector<int> horizontal_lines;
    std::vector<Rect> candidates;
    std::vector<Rect> accepted;
};

ProjectionProfile horizontal_profile(const EdgeMap& edge);

// Column sums over rows [row_begin, row_end).
ProjectionProfile vertical_profile(const EdgeMap& edge, int row_begin, int row_end);

// Throws std::invalid_argument for profiles shorter than 3.
DifferenceProfile differences(const ProjectionProfile& profile);

// Data-derived prominence bound: the larger of floor_frac * max|d1| and a
// noise ceiling estimated from the trimmed nonzero |d1| bulk.
double prominence_threshold(std::span<const double> d1, double floor_frac = 0.05);

LabelArray epsilon_cca(std::span<const double> d1, double prominence, int epsilon);

// Eq-style local-mean gate: keeps d2[i] only where |d2[i]| strictly exceeds
// the mean |d2| of its component; unlabeled indices become zero.
std::vector<double> local_mean_filter(std::span<const double> d2, const LabelArray& labels);

// One boundary index per component: argmin of the filtered second difference
// within the component (ties toward the smaller index). Components where the
// filter kept nothing fall back to the argmin of the unfiltered d2.
std::vector<int> locate_lines(std::span<const double> filtered,
                              std::span<const double> raw_d2, const LabelArray& labels);

// Full band localization: horizontal boundary lines, per-strip vertical
// boundary lines with the same machinery, then density and size gates.
// Result is sorted by (y, x); rectangles are pairwise non-overlapping.
std::vector<TextBand> detect_bands(const EdgeMap& edge, const DetectParams& params = {},
                                   DetectDebug* debug = nullptr);

}  // namespace otx::detect
