#include "otx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otx::eval {

namespace {

double best_iou(const Rect& r, const std::vector<Rect>& others) {
    double best = 0.0;
    for (const Rect& o : others) best = std::max(best, iou(r, o));
    return best;
}

}  // namespace

DetectionMetrics epshtein_prf(const std::vector<std::vector<Rect>>& detections,
                              const std::vector<std::vector<Rect>>& ground_truth) {
    if (detections.size() != ground_truth.size())
        throw std::invalid_argument("epshtein_prf: frame count mismatch");

    double det_score = 0.0, gt_score = 0.0;
    std::size_t det_count = 0, gt_count = 0;
    for (std::size_t f = 0; f < detections.size(); ++f) {
        for (const Rect& d : detections[f]) det_score += best_iou(d, ground_truth[f]);
        for (const Rect& g : ground_truth[f]) gt_score += best_iou(g, detections[f]);
        det_count += detections[f].size();
        gt_count += ground_truth[f].size();
    }

    DetectionMetrics m;
    if (det_count == 0 && gt_count == 0) {
        m.precision = m.recall = m.f_measure = 1.0;
        return m;
    }
    m.precision = det_count ? det_score / static_cast<double>(det_count) : 0.0;
    m.recall = gt_count ? gt_score / static_cast<double>(gt_count) : 1.0;
    m.f_measure = (m.precision + m.recall) > 0.0
                      ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                      : 0.0;
    return m;
}

TrackMetrics track_purity_switches(std::span<const TrackSpan> system_tracks,
                                   std::span<const TrackSpan> gt_tracks) {
    TrackMetrics m;
    m.total = static_cast<int>(system_tracks.size());
    std::vector<int> assigned_count(gt_tracks.size(), 0);

    for (const TrackSpan& sys : system_tracks) {
        // Assignment by maximal summed per-frame IoU.
        int assigned = -1;
        double best_sum = 0.0;
        for (std::size_t g = 0; g < gt_tracks.size(); ++g) {
            double sum = 0.0;
            for (const auto& [frame, rect] : sys.rect_by_frame) {
                const auto it = gt_tracks[g].rect_by_frame.find(frame);
                if (it != gt_tracks[g].rect_by_frame.end()) sum += iou(rect, it->second);
            }
            if (sum > best_sum) {
                best_sum = sum;
                assigned = static_cast<int>(g);
            }
        }
        if (assigned < 0) continue;  // no overlap anywhere: unassigned, impure
        ++assigned_count[assigned];

        int good = 0;
        for (const auto& [frame, rect] : sys.rect_by_frame) {
            bool good_frame = false;
            bool other_hit = false;
            for (std::size_t g = 0; g < gt_tracks.size(); ++g) {
                const auto it = gt_tracks[g].rect_by_frame.find(frame);
                if (it == gt_tracks[g].rect_by_frame.end()) continue;
                const double s = iou(rect, it->second);
                if (static_cast<int>(g) == assigned) {
                    good_frame = s >= 0.5;
                } else if (s >= 0.5) {
                    other_hit = true;
                }
            }
            if (good_frame && !other_hit) ++good;
        }
        if (good >= static_cast<int>(std::ceil(0.8 * static_cast<double>(sys.rect_by_frame.size()))))
            ++m.pure;
    }

    for (int c : assigned_count) m.switches += std::max(0, c - 1);
    return m;
}

TimingSummary timing_report(std::span<const double> wall_ms) {
    if (wall_ms.empty()) throw std::invalid_argument("timing_report: no samples");
    TimingSummary s;
    s.n = static_cast<int>(wall_ms.size());
    std::vector<double> sorted(wall_ms.begin(), wall_ms.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean_ms = sum / static_cast<double>(s.n);
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(s.n)));
    s.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
    s.max_ms = sorted.back();
    return s;
}

}  // namespace otx::eval
