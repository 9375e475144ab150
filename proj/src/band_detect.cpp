#include "otx/band_detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otx::detect {

ProjectionProfile horizontal_profile(const EdgeMap& edge) {
    ProjectionProfile p;
    p.axis = Axis::horizontal;
    p.values.assign(edge.height, 0.0);
    for (int y = 0; y < edge.height; ++y) {
        double sum = 0.0;
        const float* row = &edge.val[static_cast<std::size_t>(y) * edge.width];
        for (int x = 0; x < edge.width; ++x) sum += row[x];
        p.values[y] = sum;
    }
    return p;
}

ProjectionProfile vertical_profile(const EdgeMap& edge, int row_begin, int row_end) {
    ProjectionProfile p;
    p.axis = Axis::vertical;
    p.values.assign(edge.width, 0.0);
    for (int y = row_begin; y < row_end; ++y) {
        const float* row = &edge.val[static_cast<std::size_t>(y) * edge.width];
        for (int x = 0; x < edge.width; ++x) p.values[x] += row[x];
    }
    return p;
}

DifferenceProfile differences(const ProjectionProfile& profile) {
    const auto& v = profile.values;
    if (v.size() < 3) throw std::invalid_argument("profile too short for differences");
    DifferenceProfile d;
    d.d1.assign(v.size(), 0.0);
    d.d2.assign(v.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) d.d1[i] = v[i] - v[i - 1];
    for (std::size_t i = 2; i < v.size(); ++i) d.d2[i] = d.d1[i] - d.d1[i - 1];
    return d;
}

double prominence_threshold(std::span<const double> d1, double floor_frac) {
    if (d1.empty()) return 0.0;
    std::vector<double> mags(d1.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        mags[i] = std::abs(d1[i]);
        if (mags[i] > peak) peak = mags[i];
    }
    // Noise ceiling from the trimmed nonzero bulk: the top 4% holds the
    // transition spikes, exact zeros are suppressed regions with no
    // fluctuation of their own, the rest is baseline jitter.
    const std::size_t cut = mags.size() - mags.size() * 4 / 100;
    std::nth_element(mags.begin(), mags.begin() + cut, mags.end());
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < cut; ++i) {
        if (mags[i] <= 0.0) continue;
        sum += mags[i];
        sum2 += mags[i] * mags[i];
        ++n;
    }
    if (n == 0) return floor_frac * peak;
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    return std::max(floor_frac * peak, mean + 4.0 * std::sqrt(var));
}

LabelArray epsilon_cca(std::span<const double> d1, double prominence, int epsilon) {
    LabelArray out;
    out.labels.assign(d1.size(), 0);
    int last_prominent = -1;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        if (std::abs(d1[i]) <= prominence) continue;
        const int idx = static_cast<int>(i);
        if (last_prominent >= 0 && idx - last_prominent <= epsilon) {
            out.labels[i] = out.num_labels;  // continue current component
        } else {
            out.labels[i] = ++out.num_labels;
        }
        last_prominent = idx;
    }
    return out;
}

std::vector<double> local_mean_filter(std::span<const double> d2, const LabelArray& labels) {
    std::vector<double> sums(labels.num_labels + 1, 0.0);
    std::vector<int> counts(labels.num_labels + 1, 0);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        const int l = labels.labels[i];
        if (l == 0) continue;
        sums[l] += std::abs(d2[i]);
        ++counts[l];
    }
    std::vector<double> out(d2.size(), 0.0);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        const int l = labels.labels[i];
        if (l == 0) continue;
        const double mean = sums[l] / counts[l];
        if (std::abs(d2[i]) > mean) out[i] = d2[i];
    }
    return out;
}

std::vector<int> locate_lines(std::span<const double> filtered,
                              std::span<const double> raw_d2, const LabelArray& labels) {
    std::vector<int> lines;
    lines.reserve(labels.num_labels);
    for (int l = 1; l <= labels.num_labels; ++l) {
        int best = -1, best_raw = -1;
        bool survivor = false;
        for (std::size_t i = 0; i < filtered.size(); ++i) {
            if (labels.labels[i] != l) continue;
            if (filtered[i] != 0.0) survivor = true;
            if (best < 0 || filtered[i] < filtered[best]) best = static_cast<int>(i);
            if (best_raw < 0 || raw_d2[i] < raw_d2[best_raw]) best_raw = static_cast<int>(i);
        }
        if (best < 0) continue;  // empty component cannot occur, labels are assigned to indices
        lines.push_back(survivor ? best : best_raw);
    }
    return lines;
}

namespace {

// Boundary set {0, lines..., n} for half-open segments [b_i, b_{i+1}).
std::vector<int> segment_bounds(std::vector<int> lines, int n) {
    lines.push_back(0);
    lines.push_back(n);
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    return lines;
}

// [1,2,1]/4 smoothing with replicated ends. Applied to profiles before
// differencing: single-index noise excursions in an equalized map are large
// enough to cross any magnitude bound, while real boundaries keep their
// full level change across neighboring indices.
ProjectionProfile smooth3(const ProjectionProfile& p) {
    ProjectionProfile out = p;
    const std::size_t n = p.values.size();
    if (n < 3) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = p.values[i == 0 ? 0 : i - 1];
        const double b = p.values[i];
        const double c = p.values[i + 1 >= n ? n - 1 : i + 1];
        out.values[i] = 0.25 * a + 0.5 * b + 0.25 * c;
    }
    return out;
}

// A transition's d1 support ends one index before the matching negative
// d2 extremum (d2[i] = d1[i] - d1[i-1]); stretch every component one index
// right so the second-difference stage sees it.
LabelArray extend_right(const LabelArray& labels) {
    LabelArray out = labels;
    for (std::size_t i = 1; i < out.labels.size(); ++i) {
        if (out.labels[i] == 0 && labels.labels[i - 1] != 0 &&
            (i + 1 >= labels.labels.size() || labels.labels[i + 1] == 0))
            out.labels[i] = labels.labels[i - 1];
    }
    return out;
}

// Boundary lines of one axis. Within a strip every band spans the full strip
// height, so vertical transitions share one scale and take a high fraction
// floor plus an extra smoothing pass against per-column jitter; the
// horizontal axis mixes band widths and keeps the permissive floor.
std::vector<int> axis_lines(const ProjectionProfile& profile, int epsilon, int smooth_passes,
                            double floor_frac) {
    ProjectionProfile smoothed = profile;
    for (int i = 0; i < smooth_passes; ++i) smoothed = smooth3(smoothed);
    const DifferenceProfile d = differences(smoothed);
    const double prom = prominence_threshold(d.d1, floor_frac);
    const LabelArray labels = extend_right(epsilon_cca(d.d1, prom, epsilon));
    const std::vector<double> filtered = local_mean_filter(d.d2, labels);
    return locate_lines(filtered, d.d2, labels);
}

}  // namespace

namespace {

double region_mean(const EdgeMap& edge, const Rect& r) {
    double mass = 0.0;
    for (int y = r.y; y < r.y + r.h; ++y) {
        const float* row = &edge.val[static_cast<std::size_t>(y) * edge.width];
        for (int x = r.x; x < r.x + r.w; ++x) mass += row[x];
    }
    return mass / static_cast<double>(area(r));
}

// The located lines sit on the inner side of each boundary ramp, and a 3x3
// gradient operator cannot respond on the outermost content row or column
// (its support already straddles the boundary), so accepted rectangles run
// one pixel short of the luminance boundary per side. Grow once
// unconditionally to undo the operator radius, then keep growing while the
// next row/column still carries a nontrivial share of the band's density.
Rect snap_to_content(const EdgeMap& edge, const Rect& r, double density) {
    const double keep = 0.25 * density;
    Rect out = r;
    auto row_mean = [&](int y, int x0, int w) {
        const float* row = &edge.val[static_cast<std::size_t>(y) * edge.width];
        double s = 0.0;
        for (int x = x0; x < x0 + w; ++x) s += row[x];
        return s / w;
    };
    auto col_mean = [&](int x, int y0, int h) {
        double s = 0.0;
        for (int y = y0; y < y0 + h; ++y) s += edge.at(x, y);
        return s / h;
    };
    for (int step = 0; step < 6; ++step) {
        const bool free = step == 5;  // final step: operator-radius compensation
        if (out.y > 0 && (free || row_mean(out.y - 1, out.x, out.w) >= keep)) {
            --out.y;
            ++out.h;
        }
        if (out.y + out.h < edge.height &&
            (free || row_mean(out.y + out.h, out.x, out.w) >= keep))
            ++out.h;
        if (out.x > 0 && (free || col_mean(out.x - 1, out.y, out.h) >= keep)) {
            --out.x;
            ++out.w;
        }
        if (out.x + out.w < edge.width && (free || col_mean(out.x + out.w, out.y, out.h) >= keep))
            ++out.w;
    }
    return out;
}

}  // namespace

std::vector<TextBand> detect_bands(const EdgeMap& edge, const DetectParams& params,
                                   DetectDebug* debug) {
    std::vector<TextBand> bands;
    if (edge.width < 3 || edge.height < 3) return bands;

    double total = 0.0;
    for (float v : edge.val) total += v;
    const double global_mean = total / static_cast<double>(edge.val.size());

    const ProjectionProfile hp = horizontal_profile(edge);

    // Background density floor: the 25th-percentile row mean. Unlike the
    // global mean it does not rise with text coverage, so the same bar works
    // on sparse frames and on frames where bands fill a third of the screen.
    std::vector<double> row_means(hp.values.size());
    for (std::size_t y = 0; y < hp.values.size(); ++y)
        row_means[y] = hp.values[y] / static_cast<double>(edge.width);
    const std::size_t q25 = row_means.size() / 4;
    std::nth_element(row_means.begin(), row_means.begin() + q25, row_means.end());
    const double density_bar = global_mean + 3.0 * row_means[q25];
    const DifferenceProfile hd = differences(smooth3(hp));
    const double hprom = prominence_threshold(hd.d1, 0.18);
    const LabelArray hlabels = extend_right(epsilon_cca(hd.d1, hprom, params.epsilon));
    const std::vector<double> hfiltered = local_mean_filter(hd.d2, hlabels);
    const std::vector<int> hlines = locate_lines(hfiltered, hd.d2, hlabels);

    if (debug) {
        debug->horizontal_profile = hp.values;
        debug->horizontal_labels = hlabels.labels;
        debug->horizontal_lines = hlines;
        debug->candidates.clear();
        debug->accepted.clear();
    }

    // Located lines sit at the inner end of each boundary ramp, so a strip
    // inherits two or three partially lit ramp rows from its neighbors.
    // Candidates are evaluated on ramp-inset cores; the content snap restores
    // the true boundary afterward.
    const int inset = 2;

    const std::vector<int> ybounds = segment_bounds(hlines, edge.height);
    for (std::size_t bi = 0; bi + 1 < ybounds.size(); ++bi) {
        const int y0 = ybounds[bi] + inset;
        const int y1 = ybounds[bi + 1] - inset;
        if (y1 - y0 < params.min_band_h) continue;

        const ProjectionProfile vp = vertical_profile(edge, y0, y1);
        const std::vector<int> xlines = axis_lines(vp, params.epsilon, 2, 0.4);
        const std::vector<int> xbounds = segment_bounds(xlines, edge.width);
        std::vector<TextBand> strip_bands;
        for (std::size_t bj = 0; bj + 1 < xbounds.size(); ++bj) {
            const int x0 = xbounds[bj] + inset;
            const int x1 = xbounds[bj + 1] - inset;
            if (x1 - x0 < params.min_band_w) continue;
            const Rect r{x0, y0, x1 - x0, y1 - y0};
            if (debug) debug->candidates.push_back(r);

            const double density = region_mean(edge, r);
            if (density > density_bar) strip_bands.push_back(TextBand{r, density});
        }
        // Accepted segments separated only by the inset are one band split by
        // a spurious line: distinct bands always have a rejected gap segment
        // between them.
        for (std::size_t k = 0; k < strip_bands.size(); ++k) {
            Rect r = strip_bands[k].rect;
            while (k + 1 < strip_bands.size() &&
                   strip_bands[k + 1].rect.x - (r.x + r.w) <= 2 * inset) {
                r.w = strip_bands[k + 1].rect.x + strip_bands[k + 1].rect.w - r.x;
                ++k;
            }
            bands.push_back(TextBand{r, region_mean(edge, r)});
        }
    }

    // Content snap, then revert any rectangle whose grown form would collide
    // with a neighbor's grown form.
    std::vector<Rect> snapped(bands.size());
    for (std::size_t i = 0; i < bands.size(); ++i)
        snapped[i] = snap_to_content(edge, bands[i].rect, bands[i].density);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        bool clear = true;
        for (std::size_t j = 0; j < bands.size(); ++j)
            if (j != i && intersection_area(snapped[i], snapped[j]) > 0) clear = false;
        if (clear) bands[i].rect = snapped[i];
        bands[i].density = region_mean(edge, bands[i].rect);
    }

    std::sort(bands.begin(), bands.end(), [](const TextBand& a, const TextBand& b) {
        if (a.rect.y != b.rect.y) return a.rect.y < b.rect.y;
        return a.rect.x < b.rect.x;
    });
    if (debug)
        for (const auto& b : bands) debug->accepted.push_back(b.rect);
    return bands;
}

}  // namespace otx::detect
