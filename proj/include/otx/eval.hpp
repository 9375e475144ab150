#pragma once

#include <map>
#include <span>
#include <vector>

#include "otx/geometry.hpp"

namespace otx::eval {

struct DetectionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

// Soft precision/recall: each rectangle scores its best IoU against the
// other side, aggregated over frames weighted by rectangle count. With no
// rectangles on either side all three metrics are 1 by convention.
// Throws std::invalid_argument when the frame counts differ.
DetectionMetrics epshtein_prf(const std::vector<std::vector<Rect>>& detections,
                              const std::vector<std::vector<Rect>>& ground_truth);

struct TrackMetrics {
    int total = 0;
    int pure = 0;
    int switches = 0;
};

// Frame-indexed rectangle span of one track (system or ground truth).
struct TrackSpan {
    int id = 0;
    std::map<int, Rect> rect_by_frame;
};

// Assigns each system track to the GT track with maximal summed IoU; a track
// is pure when >= 80% of its frames score IoU >= 0.5 with its assigned GT
// and < 0.5 with every other GT. switches = sum over GT of (assigned - 1).
TrackMetrics track_purity_switches(std::span<const TrackSpan> system_tracks,
                                   std::span<const TrackSpan> gt_tracks);

struct TimingSummary {
    int n = 0;
    double mean_ms = 0.0;
    double p95_ms = 0.0;  // nearest-rank percentile
    double max_ms = 0.0;
};

TimingSummary timing_report(std::span<const double> wall_ms);

}  // namespace otx::eval
