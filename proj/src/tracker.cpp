#include "otx/tracker.hpp"

#include <algorithm>
#include <numeric>

namespace otx::track {

ColorHistogram histogram_of_region(const ColorImage& frame, const Rect& rect) {
    if (area(rect) <= 0) throw std::invalid_argument("histogram_of_region: empty region");
    if (rect.x < 0 || rect.y < 0 || rect.x + rect.w > frame.width ||
        rect.y + rect.h > frame.height)
        throw std::invalid_argument("histogram_of_region: region outside frame");
    ColorHistogram h;
    for (int y = rect.y; y < rect.y + rect.h; ++y)
        for (int x = rect.x; x < rect.x + rect.w; ++x) {
            const std::uint8_t* p = frame.px(x, y);
            const int idx = ((p[0] >> 5) << 6) | ((p[1] >> 5) << 3) | (p[2] >> 5);
            h.bins[idx] += 1.0;
        }
    const double inv = 1.0 / static_cast<double>(area(rect));
    for (auto& b : h.bins) b *= inv;
    return h;
}

double histogram_similarity(const ColorHistogram& a, const ColorHistogram& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i) s += std::min(a.bins[i], b.bins[i]);
    return s;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::new_track: return "new";
        case EventKind::updated: return "updated";
        case EventKind::restored: return "restored";
        case EventKind::merged: return "merged";
        case EventKind::split: return "split";
        case EventKind::terminated: return "terminated";
    }
    return "?";
}

AssociationSets build_association_sets(std::span<const Rect> track_rects,
                                       std::span<const Rect> detection_rects, double eta) {
    AssociationSets s;
    s.track_overlaps.resize(track_rects.size());
    s.detection_overlaps.resize(detection_rects.size());
    for (std::size_t i = 0; i < track_rects.size(); ++i) {
        if (area(track_rects[i]) <= 0) continue;
        for (std::size_t j = 0; j < detection_rects.size(); ++j) {
            if (area(detection_rects[j]) <= 0) continue;
            if (intersection_area(track_rects[i], detection_rects[j]) <= 0) continue;
            if (rcc5_classify(track_rects[i], detection_rects[j], eta) == Rcc5::DC) continue;
            s.track_overlaps[i].push_back(static_cast<int>(j));
            s.detection_overlaps[j].push_back(static_cast<int>(i));
        }
    }
    return s;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

ColorHistogram blended(const ColorHistogram& old_h, const ColorHistogram& new_h) {
    ColorHistogram out;
    double sum = 0.0;
    for (std::size_t i = 0; i < out.bins.size(); ++i) {
        out.bins[i] = 0.7 * old_h.bins[i] + 0.3 * new_h.bins[i];
        sum += out.bins[i];
    }
    if (sum > 0.0)
        for (auto& b : out.bins) b /= sum;
    return out;
}

}  // namespace

StepResult Tracker::step(int frame_index, const ColorImage& frame,
                         const std::vector<detect::TextBand>& detections) {
    StepResult result;
    result.outcomes.assign(detections.size(), DetectionOutcome::rejected);

    const Rect frame_rect{0, 0, frame.width, frame.height};
    std::vector<int> valid;  // original detection indices
    std::vector<Rect> det_rects;
    for (std::size_t j = 0; j < detections.size(); ++j) {
        const Rect& r = detections[j].rect;
        if (area(r) <= 0 || !contains(frame_rect, r)) continue;  // stays rejected
        valid.push_back(static_cast<int>(j));
        det_rects.push_back(r);
    }

    const int m = static_cast<int>(active_.size());
    const int n = static_cast<int>(det_rects.size());
    std::vector<Rect> track_rects(m);
    for (int i = 0; i < m; ++i) track_rects[i] = active_[i].rect;

    AssociationSets assoc = build_association_sets(track_rects, det_rects, cfg_.eta_fo);

    UnionFind uf(m + n);
    for (int i = 0; i < m; ++i)
        for (int j : assoc.track_overlaps[i]) uf.unite(i, m + j);

    // Group members per component root, preserving ascending order.
    std::vector<std::vector<int>> comp_tracks(m + n), comp_dets(m + n);
    for (int i = 0; i < m; ++i) comp_tracks[uf.find(i)].push_back(i);
    for (int j = 0; j < n; ++j) comp_dets[uf.find(m + j)].push_back(j);

    std::vector<char> track_alive(m, 1);
    std::vector<std::vector<int>> links = assoc.track_overlaps;  // mutable copy
    std::vector<Track> spawned;

    auto hist_of = [&](const Rect& r) { return histogram_of_region(frame, r); };

    auto apply_update = [&](Track& t, const Rect& new_rect) {
        t.rect = new_rect;
        t.hist = blended(t.hist, hist_of(new_rect));
        t.misses = 0;
        ++t.age;
        t.history.emplace_back(frame_index, new_rect);
    };

    auto terminate = [&](Track& t, EventKind kind, const std::vector<int>& ids) {
        result.events.push_back(TrackEvent{frame_index, kind, ids, {t.rect}});
        t.active = false;
    };

    auto handle_disappearance = [&](Track& t) {
        const double sim = histogram_similarity(hist_of(t.rect), t.hist);
        if (sim >= cfg_.hist_match && t.misses < cfg_.max_misses) {
            ++t.misses;
            ++t.age;
            t.history.emplace_back(frame_index, t.rect);
            result.events.push_back(
                TrackEvent{frame_index, EventKind::restored, {t.id}, {t.rect}});
        } else {
            terminate(t, EventKind::terminated, {t.id});
        }
    };

    auto make_track = [&](const Rect& r) -> Track& {
        Track t;
        t.id = next_id_++;
        t.rect = r;
        t.hist = hist_of(r);
        t.age = 1;
        t.misses = 0;
        t.history.emplace_back(frame_index, r);
        spawned.push_back(std::move(t));
        return spawned.back();
    };

    for (int root = 0; root < m + n; ++root) {
        const auto& T = comp_tracks[root];
        const auto& D = comp_dets[root];
        if (T.empty() && D.empty()) continue;

        if (T.empty()) {
            // New entries.
            for (int j : D) {
                Track& t = make_track(det_rects[j]);
                result.events.push_back(
                    TrackEvent{frame_index, EventKind::new_track, {t.id}, {t.rect}});
                result.outcomes[valid[j]] = DetectionOutcome::new_entry;
            }
            continue;
        }
        if (D.empty()) {
            for (int i : T) handle_disappearance(active_[i]);
            continue;
        }

        // Merge pass: several tracks covering one detection collapse into the
        // oldest when their union already matches the detection.
        for (int j : D) {
            std::vector<int> linked;
            for (int i : T)
                if (track_alive[i] &&
                    std::find(links[i].begin(), links[i].end(), j) != links[i].end())
                    linked.push_back(i);
            if (linked.size() < 2) continue;
            Rect u{};
            for (int i : linked) u = bounding_union(u, active_[i].rect);
            const Rcc5 rel = rcc5_classify(u, det_rects[j], cfg_.eta_fo);
            if (rel != Rcc5::EQ && rel != Rcc5::PP) continue;
            const int survivor = linked.front();  // smallest index = oldest id
            for (std::size_t k = 1; k < linked.size(); ++k) {
                const int absorbed = linked[k];
                terminate(active_[absorbed], EventKind::merged,
                          {active_[absorbed].id, active_[survivor].id});
                track_alive[absorbed] = 0;
                // Survivor inherits the absorbed track's detection links.
                for (int dj : links[absorbed])
                    if (std::find(links[survivor].begin(), links[survivor].end(), dj) ==
                        links[survivor].end())
                        links[survivor].push_back(dj);
                links[absorbed].clear();
            }
            std::sort(links[survivor].begin(), links[survivor].end());
            result.outcomes[valid[j]] = DetectionOutcome::merged_target;
        }

        // Contended detections: still linked to two or more live tracks after
        // the merge pass. Every such track updates against its overlap region.
        std::vector<char> det_contended(n, 0);
        for (int j : D) {
            int cnt = 0;
            for (int i : T)
                if (track_alive[i] &&
                    std::find(links[i].begin(), links[i].end(), j) != links[i].end())
                    ++cnt;
            if (cnt >= 2) {
                det_contended[j] = 1;
                result.outcomes[valid[j]] = DetectionOutcome::contended;
            }
        }

        // Exclusive assignment of uncontended detections.
        std::vector<std::vector<int>> assigned(m);
        for (int j : D) {
            if (det_contended[j]) continue;
            for (int i : T)
                if (track_alive[i] &&
                    std::find(links[i].begin(), links[i].end(), j) != links[i].end()) {
                    assigned[i].push_back(j);
                    break;
                }
        }

        for (int i : T) {
            if (!track_alive[i]) continue;
            Track& t = active_[i];
            if (assigned[i].empty()) {
                // Only contended detections (or none) left for this track.
                int best = -1;
                std::int64_t best_area = -1;
                for (int j : links[i]) {
                    if (!det_contended[j]) continue;
                    const std::int64_t a = intersection_area(t.rect, det_rects[j]);
                    if (a > best_area) {
                        best_area = a;
                        best = j;
                    }
                }
                if (best < 0) {
                    handle_disappearance(t);
                    continue;
                }
                apply_update(t, intersect(t.rect, det_rects[best]));
                result.events.push_back(
                    TrackEvent{frame_index, EventKind::updated, {t.id}, {t.rect}});
            } else if (assigned[i].size() == 1) {
                const int j = assigned[i].front();
                const Rect& d = det_rects[j];
                const Rcc5 rel = rcc5_classify(t.rect, d, cfg_.eta_fo);
                Rect new_rect = d;
                if (rel == Rcc5::PPi) {
                    // Detection shrank to a fragment; keep the full band if the
                    // fragment still looks like this track.
                    if (histogram_similarity(hist_of(d), t.hist) >= cfg_.hist_match)
                        new_rect = t.rect;
                } else if (rel == Rcc5::PO) {
                    if (histogram_similarity(hist_of(d), t.hist) >= cfg_.hist_match)
                        new_rect = bounding_union(t.rect, d);
                }
                apply_update(t, new_rect);
                result.events.push_back(
                    TrackEvent{frame_index, EventKind::updated, {t.id}, {t.rect}});
                if (result.outcomes[valid[j]] != DetectionOutcome::merged_target)
                    result.outcomes[valid[j]] = DetectionOutcome::unique;
            } else {
                // Split: the largest overlap keeps the id, the rest spawn.
                int keep = -1;
                std::int64_t best_area = -1;
                for (int j : assigned[i]) {
                    const std::int64_t a = intersection_area(t.rect, det_rects[j]);
                    if (a > best_area) {
                        best_area = a;
                        keep = j;
                    }
                }
                TrackEvent ev{frame_index, EventKind::split, {t.id}, {det_rects[keep]}};
                apply_update(t, det_rects[keep]);
                if (result.outcomes[valid[keep]] != DetectionOutcome::merged_target)
                    result.outcomes[valid[keep]] = DetectionOutcome::split_kept;
                for (int j : assigned[i]) {
                    if (j == keep) continue;
                    Track& child = make_track(det_rects[j]);
                    ev.track_ids.push_back(child.id);
                    ev.rects.push_back(child.rect);
                    result.outcomes[valid[j]] = DetectionOutcome::split_child;
                }
                result.events.push_back(std::move(ev));
            }
        }
    }

    // Rebuild the active set: survivors keep creation order, spawned ids are
    // strictly larger, so the list stays sorted by id.
    std::vector<Track> next_active;
    next_active.reserve(active_.size() + spawned.size());
    for (auto& t : active_) {
        if (t.active)
            next_active.push_back(std::move(t));
        else
            finished_.push_back(std::move(t));
    }
    for (auto& t : spawned) next_active.push_back(std::move(t));
    active_ = std::move(next_active);
    return result;
}

std::vector<TrackEvent> Tracker::finalize(int frame_index) {
    std::vector<TrackEvent> events;
    for (auto& t : active_) {
        events.push_back(TrackEvent{frame_index, EventKind::terminated, {t.id}, {t.rect}});
        t.active = false;
        finished_.push_back(std::move(t));
    }
    active_.clear();
    return events;
}

}  // namespace otx::track
