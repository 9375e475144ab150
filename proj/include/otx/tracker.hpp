#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "otx/band_detect.hpp"
#include "otx/image.hpp"
#include "otx/rcc5.hpp"

namespace otx::track {

// Normalized 8x8x8 RGB histogram (512 bins).
struct ColorHistogram {
    std::array<double, 512> bins{};
};

// Throws std::invalid_argument for empty or out-of-frame regions.
ColorHistogram histogram_of_region(const ColorImage& frame, const Rect& rect);

// Histogram intersection, in [0,1] for normalized inputs.
double histogram_similarity(const ColorHistogram& a, const ColorHistogram& b);

enum class EventKind { new_track, updated, restored, merged, split, terminated };

const char* to_string(EventKind kind);

struct TrackEvent {
    int frame = 0;
    EventKind kind = EventKind::new_track;
    std::vector<int> track_ids;  // first id is the subject
    std::vector<Rect> rects;
};

struct Track {
    int id = 0;
    Rect rect;
    ColorHistogram hist;
    int age = 0;     // frames alive
    int misses = 0;  // consecutive undetected frames
    std::vector<std::pair<int, Rect>> history;  // (frame, rect) per frame alive
    bool active = true;
};

// Mutual overlap sets: track_overlaps[i] lists detection indices whose
// relation to track i is not DC, and vice versa.
struct AssociationSets {
    std::vector<std::vector<int>> track_overlaps;
    std::vector<std::vector<int>> detection_overlaps;
};

AssociationSets build_association_sets(std::span<const Rect> track_rects,
                                       std::span<const Rect> detection_rects, double eta);

// Which branch consumed each detection; used for event auditing.
enum class DetectionOutcome {
    new_entry,
    unique,
    split_kept,
    split_child,
    merged_target,
    contended,
    rejected
};

struct StepResult {
    std::vector<TrackEvent> events;
    std::vector<DetectionOutcome> outcomes;  // one per input detection
};

struct TrackerConfig {
    double eta_fo = 0.1;
    double hist_match = 0.8;
    int max_misses = 5;
};

// Sequential multi-band tracker. Frames must be fed in temporal order by a
// single owner; detection may run ahead elsewhere.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg = {}) : cfg_(cfg) {}

    StepResult step(int frame_index, const ColorImage& frame,
                    const std::vector<detect::TextBand>& detections);

    // Terminates all remaining active tracks (end of stream).
    std::vector<TrackEvent> finalize(int frame_index);

    const std::vector<Track>& active() const { return active_; }
    const std::vector<Track>& finished() const { return finished_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    TrackerConfig cfg_;
    std::vector<Track> active_;
    std::vector<Track> finished_;
    int next_id_ = 1;
};

}  // namespace otx::track
