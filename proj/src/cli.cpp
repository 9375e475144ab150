#include "otx/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "otx/band_detect.hpp"
#include "otx/errors.hpp"
#include "otx/extract.hpp"
#include "otx/formats.hpp"
#include "otx/image_io.hpp"
#include "otx/preprocess.hpp"
#include "otx/synth.hpp"
#include "otx/tracker.hpp"

namespace otx::cli {

using json = nlohmann::json;

namespace {

struct Frame {
    int index = 0;
    std::string name;
    ColorImage image;
};

// Frames from a directory (lexicographic order) or a netpbm stream on stdin.
class FrameSource {
public:
    explicit FrameSource(const std::string& input) {
        if (input == "-") {
            stream_ = &std::cin;
            return;
        }
        const std::filesystem::path dir(input);
        if (!std::filesystem::is_directory(dir))
            throw io_error("input is not a directory: " + input);
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png")
                paths_.push_back(entry.path());
        }
        std::sort(paths_.begin(), paths_.end());
    }

    // False at end of input. Per-file read errors are reported and skipped;
    // stream errors are fatal.
    bool next(Frame& frame) {
        while (true) {
            if (stream_) {
                auto img = io::read_netpbm(*stream_, "<stdin>");
                if (!img) return false;
                frame = Frame{index_++, "stdin:" + std::to_string(index_ - 1), std::move(*img)};
            } else {
                if (cursor_ >= paths_.size()) return false;
                const auto path = paths_[cursor_++];
                try {
                    frame = Frame{index_, path.stem().string(), io::read_image(path)};
                } catch (const std::exception& e) {
                    std::cerr << "error: skipping " << path.string() << ": " << e.what() << "\n";
                    continue;
                }
                ++index_;
            }
            if (ref_w_ == 0) {
                ref_w_ = frame.image.width;
                ref_h_ = frame.image.height;
            } else if (frame.image.width != ref_w_ || frame.image.height != ref_h_) {
                std::cerr << "error: skipping " << frame.name << ": frame size "
                          << frame.image.width << "x" << frame.image.height
                          << " differs from " << ref_w_ << "x" << ref_h_ << "\n";
                --index_;
                if (stream_) throw io_error("mixed frame sizes on stdin stream");
                continue;
            }
            return true;
        }
    }

private:
    std::istream* stream_ = nullptr;
    std::vector<std::filesystem::path> paths_;
    std::size_t cursor_ = 0;
    int index_ = 0;
    int ref_w_ = 0;
    int ref_h_ = 0;
};

struct SinkStream {
    std::ofstream file;
    std::ostream* out = nullptr;

    explicit SinkStream(const std::string& path) {
        if (path == "-") {
            out = &std::cout;
        } else {
            file.open(path);
            if (!file) throw io_error("cannot write " + path);
            out = &file;
        }
    }
    std::ostream& get() { return *out; }
};

detect::DetectParams detect_params(const Config& cfg) {
    detect::DetectParams p;
    p.epsilon = cfg.epsilon;
    p.min_band_w = cfg.min_band_w;
    p.min_band_h = cfg.min_band_h;
    return p;
}

struct FrameDetection {
    std::vector<detect::TextBand> bands;
    double wall_ms = 0.0;
};

FrameDetection detect_frame(const ColorImage& image, const Config& cfg,
                            const std::string& name) {
    FrameDetection out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const GrayFrame gray = preprocess::to_luminance(image);
        EdgeMap edge;
        preprocess::EnhanceDebug pdbg;
        const bool want_debug = !cfg.debug_dir.empty();
        if (cfg.enhance)
            edge = preprocess::enhance(gray, want_debug ? &pdbg : nullptr);
        else
            edge = preprocess::normalized_gradient(gray);

        detect::DetectDebug ddbg;
        out.bands = detect::detect_bands(edge, detect_params(cfg), want_debug ? &ddbg : nullptr);

        if (want_debug) {
            const std::filesystem::path dir(cfg.debug_dir);
            std::filesystem::create_directories(dir);
            if (cfg.enhance) {
                io::write_pgm_scaled(dir / (name + "_grad.pgm"), edge.width, edge.height,
                                     pdbg.normalized.val);
                io::write_pgm_scaled(dir / (name + "_stretch.pgm"), edge.width, edge.height,
                                     pdbg.stretched.val);
                io::write_pgm_scaled(dir / (name + "_eq.pgm"), edge.width, edge.height, edge.val);
            }
            json jb;
            jb["profile"] = ddbg.horizontal_profile;
            jb["labels"] = ddbg.horizontal_labels;
            jb["lines"] = ddbg.horizontal_lines;
            auto rects_json = [](const std::vector<Rect>& rs) {
                json arr = json::array();
                for (const Rect& r : rs) arr.push_back({r.x, r.y, r.w, r.h});
                return arr;
            };
            jb["candidates"] = rects_json(ddbg.candidates);
            jb["accepted"] = rects_json(ddbg.accepted);
            std::ofstream jf(dir / (name + "_bands.json"));
            jf << jb.dump(2) << "\n";
        }
    } catch (const std::runtime_error& e) {
        // Constant frames have no gradients anywhere; detection is empty.
        // Anything else is a per-frame failure worth a note.
        if (std::string_view(e.what()) != "blank frame")
            std::cerr << "error: frame " << name << ": " << e.what() << "\n";
        out.bands.clear();
    } catch (const std::exception& e) {
        std::cerr << "error: frame " << name << ": " << e.what() << "\n";
        out.bands.clear();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
}

}  // namespace

int cmd_detect(const DetectOptions& opt) {
    opt.config.validate();
    FrameSource source(opt.input);
    SinkStream sink(opt.output);
    if (!opt.config.debug_dir.empty())
        std::filesystem::create_directories(opt.config.debug_dir);

    std::ofstream timing;
    if (!opt.timing_out.empty()) {
        timing.open(opt.timing_out);
        if (!timing) throw io_error("cannot write " + opt.timing_out);
    }

    std::vector<double> wall_times;
    const int workers = std::max(1, opt.config.threads);

    // Sliding window of async detections keeps output strictly in frame order.
    std::deque<std::pair<Frame, std::future<FrameDetection>>> window;
    auto flush_one = [&] {
        auto& [frame, fut] = window.front();
        FrameDetection det = fut.get();
        io::write_bands_record(sink.get(), frame.index, det.bands);
        wall_times.push_back(det.wall_ms);
        if (timing.is_open())
            timing << json{{"frame", frame.index}, {"ms", det.wall_ms}}.dump() << "\n";
        window.pop_front();
    };

    Frame frame;
    while (source.next(frame)) {
        if (static_cast<int>(window.size()) >= workers) flush_one();
        const auto policy = workers > 1 ? std::launch::async : std::launch::deferred;
        window.emplace_back(std::move(frame), std::future<FrameDetection>{});
        // Deque growth keeps element addresses stable; the front is only
        // popped after its future has been consumed.
        const Frame& stored = window.back().first;
        window.back().second = std::async(policy, [&stored, cfg = opt.config] {
            return detect_frame(stored.image, cfg, stored.name);
        });
    }
    while (!window.empty()) flush_one();

    if (!wall_times.empty()) {
        const auto summary = eval::timing_report(wall_times);
        std::cerr << "detect: " << summary.n << " frames, mean " << summary.mean_ms
                  << " ms, p95 " << summary.p95_ms << " ms, max " << summary.max_ms << " ms\n";
    }
    return kExitOk;
}

namespace {

void flush_tracks(const std::filesystem::path& outdir,
                  const std::vector<track::Track>& finished,
                  const std::map<int, std::vector<BinaryImage>>& binarizations,
                  int min_track_age) {
    std::ofstream tracks_out(outdir / "tracks.jsonl");
    if (!tracks_out) throw io_error("cannot write tracks.jsonl");
    std::filesystem::create_directories(outdir / "bands");

    std::vector<const track::Track*> ordered;
    ordered.reserve(finished.size());
    for (const auto& t : finished) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const track::Track* a, const track::Track* b) { return a->id < b->id; });

    for (const track::Track* t : ordered) {
        // Single-frame artifacts do not persist; trajectory analysis drops them.
        if (t->age < min_track_age) continue;
        io::write_track_record(tracks_out, *t);
        const auto it = binarizations.find(t->id);
        if (it == binarizations.end() || it->second.empty()) continue;
        std::vector<Rect> rects;
        rects.reserve(t->history.size());
        for (const auto& [f, r] : t->history) rects.push_back(r);
        const auto [cw, ch] = extract::canonical_size(rects);
        const extract::AccumulatedBand acc = extract::accumulate(it->second, cw, ch);
        std::vector<std::uint8_t> gray(acc.final.bits.size());
        for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = acc.final.bits[i] ? 0 : 255;
        char name[32];
        std::snprintf(name, sizeof(name), "track_%06d.pgm", t->id);
        io::write_pgm(outdir / "bands" / name, acc.width, acc.height, gray);
    }
}

}  // namespace

int cmd_track(const TrackOptions& opt) {
    opt.config.validate();
    FrameSource source(opt.input);
    std::filesystem::create_directories(opt.output_dir);
    std::ofstream events_out(opt.output_dir / "events.jsonl");
    if (!events_out) throw io_error("cannot write events.jsonl");

    // Optional precomputed detections, keyed by frame index.
    std::map<int, std::vector<detect::TextBand>> precomputed;
    const bool use_precomputed = !opt.detections.empty();
    if (use_precomputed)
        for (auto& rec : io::read_bands_jsonl(opt.detections))
            precomputed[rec.frame] = std::move(rec.bands);

    track::TrackerConfig tcfg;
    tcfg.eta_fo = opt.config.eta_fo;
    tcfg.hist_match = opt.config.hist_match;
    tcfg.max_misses = opt.config.max_misses;
    track::Tracker tracker(tcfg);

    std::map<int, std::vector<BinaryImage>> binarizations;
    int last_frame = -1;

    Frame frame;
    while (source.next(frame)) {
        last_frame = frame.index;
        std::vector<detect::TextBand> bands;
        if (use_precomputed) {
            const auto it = precomputed.find(frame.index);
            if (it != precomputed.end()) bands = it->second;
        } else {
            bands = detect_frame(frame.image, opt.config, frame.name).bands;
        }

        const track::StepResult step = tracker.step(frame.index, frame.image, bands);
        for (std::size_t j = 0; j < step.outcomes.size(); ++j)
            if (step.outcomes[j] == track::DetectionOutcome::rejected)
                std::cerr << "warning: frame " << frame.index << ": rejected malformed detection "
                          << j << "\n";
        for (const auto& ev : step.events) io::write_event_record(events_out, ev);

        for (const auto& t : tracker.active())
            binarizations[t.id].push_back(extract::binarize_band(frame.image, t.rect));
    }

    for (const auto& ev : tracker.finalize(last_frame + 1)) io::write_event_record(events_out, ev);
    flush_tracks(opt.output_dir, tracker.finished(), binarizations,
                 opt.config.min_track_age);
    return kExitOk;
}

int cmd_extract(const ExtractOptions& opt) {
    opt.config.validate();
    const bool correction = opt.correct || !opt.config.wordlist.empty();
    if (correction && opt.config.wordlist.empty())
        throw config_error("dictionary correction enabled but no wordlist given");
    if (opt.config.ocr_cmd.empty()) throw config_error("OCR command not configured (--ocr-cmd)");
    if (opt.config.ocr_cmd.find("{img}") == std::string::npos)
        throw config_error("OCR command template lacks {img} placeholder");

    extract::Dictionary dict;
    if (correction) dict = extract::Dictionary::load(opt.config.wordlist);

    const auto records = io::read_tracks_jsonl(opt.tracks_dir / "tracks.jsonl");
    struct Item {
        int track_id;
        std::filesystem::path band;
    };
    std::vector<Item> items;
    for (const auto& rec : records) {
        char name[32];
        std::snprintf(name, sizeof(name), "track_%06d.pgm", rec.id);
        const auto band = opt.tracks_dir / "bands" / name;
        if (std::filesystem::exists(band)) items.push_back({rec.id, band});
    }

    std::vector<std::string> raw(items.size());
    std::vector<std::string> failures(items.size());
    std::atomic<std::size_t> cursor{0};
    const int jobs =
        std::max(1, std::min(opt.config.ocr_jobs, static_cast<int>(items.size())));

    auto worker = [&](int worker_id) {
        while (true) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= items.size()) return;
            try {
                int w = 0, h = 0;
                const auto gray = io::read_pgm(items[k].band, w, h);
                extract::AccumulatedBand acc;
                acc.width = w;
                acc.height = h;
                acc.n = 1;
                acc.final = BinaryImage(w, h);
                bool any = false;
                for (std::size_t i = 0; i < gray.size(); ++i) {
                    acc.final.bits[i] = gray[i] < 128 ? 1 : 0;  // dark pixels are foreground
                    any = any || acc.final.bits[i];
                }
                if (!any) {
                    std::cerr << "warning: track " << items[k].track_id
                              << ": empty accumulated band, skipping OCR\n";
                    raw[k] = "";
                    continue;
                }
                const auto workdir = std::filesystem::temp_directory_path() /
                                     ("otx-ocr-" + std::to_string(::getpid()) + "-" +
                                      std::to_string(worker_id) + "-" + std::to_string(k));
                raw[k] = extract::run_ocr(acc, opt.config.ocr_cmd, opt.config.ocr_timeout_s,
                                          workdir);
                std::filesystem::remove_all(workdir);
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();

    for (std::size_t k = 0; k < items.size(); ++k)
        if (!failures[k].empty())
            throw command_error("track " + std::to_string(items[k].track_id) + ": " + failures[k]);

    SinkStream sink(opt.output);
    for (std::size_t k = 0; k < items.size(); ++k) {
        // Trim trailing newlines from engine output.
        std::string text = raw[k];
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        const std::string corrected =
            correction ? extract::dictionary_correct(text, dict, opt.config.max_edit) : text;
        io::write_recognition_record(sink.get(), items[k].track_id, text, corrected);
    }
    return kExitOk;
}

int cmd_eval(const EvalOptions& opt) {
    opt.config.validate();
    if (!opt.rec.empty() && opt.tracks.empty())
        throw config_error("--rec requires --tracks for track-to-GT assignment");

    const auto pred = io::read_bands_jsonl(opt.pred);
    const auto gt = io::read_gt_jsonl(opt.gt);

    // Align by frame number over the union of both sides.
    std::map<int, std::vector<Rect>> pred_by_frame, gt_by_frame;
    for (const auto& rec : pred) {
        auto& v = pred_by_frame[rec.frame];
        for (const auto& b : rec.bands) v.push_back(b.rect);
    }
    for (const auto& f : gt) {
        auto& v = gt_by_frame[f.frame];
        for (const auto& b : f.bands) v.push_back(b.rect);
    }
    std::vector<std::vector<Rect>> pred_frames, gt_frames;
    {
        std::map<int, std::pair<std::vector<Rect>, std::vector<Rect>>> merged;
        for (auto& [f, v] : pred_by_frame) merged[f].first = std::move(v);
        for (auto& [f, v] : gt_by_frame) merged[f].second = std::move(v);
        for (auto& [f, pair] : merged) {
            pred_frames.push_back(std::move(pair.first));
            gt_frames.push_back(std::move(pair.second));
        }
    }

    json report;
    const auto det = eval::epshtein_prf(pred_frames, gt_frames);
    report["detection"] = {{"precision", det.precision},
                           {"recall", det.recall},
                           {"f_measure", det.f_measure}};

    std::printf("%-22s %10s\n", "metric", "value");
    std::printf("%-22s %10.4f\n", "detection.precision", det.precision);
    std::printf("%-22s %10.4f\n", "detection.recall", det.recall);
    std::printf("%-22s %10.4f\n", "detection.f_measure", det.f_measure);

    std::vector<eval::TrackSpan> sys_spans;
    if (!opt.tracks.empty()) {
        for (const auto& rec : io::read_tracks_jsonl(opt.tracks)) sys_spans.push_back(io::to_span(rec));
        const auto gt_spans = io::gt_track_spans(gt);
        const auto tm = eval::track_purity_switches(sys_spans, gt_spans);
        report["tracking"] = {{"total", tm.total}, {"pure", tm.pure}, {"switches", tm.switches}};
        std::printf("%-22s %10d\n", "tracking.total", tm.total);
        std::printf("%-22s %10d\n", "tracking.pure", tm.pure);
        std::printf("%-22s %10d\n", "tracking.switches", tm.switches);
    }

    if (!opt.rec.empty()) {
        // Reference text comes from the GT track each system track maps onto.
        std::map<int, std::string> gt_text;
        for (const auto& f : gt)
            for (const auto& b : f.bands)
                if (!b.text.empty()) gt_text[b.track_id] = b.text;

        const auto gt_spans = io::gt_track_spans(gt);
        std::map<int, const eval::TrackSpan*> sys_by_id;
        for (const auto& s : sys_spans) sys_by_id[s.id] = &s;

        std::size_t char_err = 0, char_len = 0, word_err = 0, word_len = 0;
        int scored = 0;
        for (const auto& rec : io::read_recognition_jsonl(opt.rec)) {
            const auto it = sys_by_id.find(rec.track_id);
            if (it == sys_by_id.end()) continue;
            int best_gt = -1;
            double best_sum = 0.0;
            for (const auto& g : gt_spans) {
                double sum = 0.0;
                for (const auto& [frame, rect] : it->second->rect_by_frame) {
                    const auto fit = g.rect_by_frame.find(frame);
                    if (fit != g.rect_by_frame.end()) sum += iou(rect, fit->second);
                }
                if (sum > best_sum) {
                    best_sum = sum;
                    best_gt = g.id;
                }
            }
            if (best_gt < 0) continue;
            const auto text_it = gt_text.find(best_gt);
            if (text_it == gt_text.end() || text_it->second.empty()) continue;
            const std::string& ref = text_it->second;
            char_err += extract::levenshtein(rec.corrected, ref);
            char_len += ref.size();
            auto tokens = [](const std::string& s) {
                std::istringstream in(s);
                std::vector<std::string> out;
                std::string t;
                while (in >> t) out.push_back(t);
                return out;
            };
            const auto hyp_toks = tokens(rec.corrected);
            const auto ref_toks = tokens(ref);
            std::vector<std::size_t> row(ref_toks.size() + 1);
            for (std::size_t j = 0; j <= ref_toks.size(); ++j) row[j] = j;
            for (std::size_t i = 1; i <= hyp_toks.size(); ++i) {
                std::size_t diag = row[0];
                row[0] = i;
                for (std::size_t j = 1; j <= ref_toks.size(); ++j) {
                    const std::size_t up = row[j];
                    const std::size_t cost = (hyp_toks[i - 1] == ref_toks[j - 1]) ? 0 : 1;
                    row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
                    diag = up;
                }
            }
            word_err += row[ref_toks.size()];
            word_len += ref_toks.size();
            ++scored;
        }
        if (char_len > 0) {
            const double cer = static_cast<double>(char_err) / static_cast<double>(char_len);
            const double wer =
                word_len ? static_cast<double>(word_err) / static_cast<double>(word_len) : 0.0;
            report["recognition"] = {{"cer", cer}, {"wer", wer}, {"tracks_scored", scored}};
            std::printf("%-22s %10.4f\n", "recognition.cer", cer);
            std::printf("%-22s %10.4f\n", "recognition.wer", wer);
        }
    }

    if (!opt.report.empty()) {
        std::ofstream out(opt.report);
        if (!out) throw io_error("cannot write " + opt.report);
        out << report.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_synth(const SynthOptions& opt) {
    opt.config.validate();
    synth::SynthSpec spec = synth::spec_from_json_file(opt.spec_path);
    if (opt.seed) spec.seed = *opt.seed;
    synth::render_sequence(spec, opt.output_dir, opt.format);
    return kExitOk;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const command_error& e) {
        std::cerr << "external command error: " << e.what() << "\n";
        return kExitCommand;
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace otx::cli
