#include "otx/formats.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "otx/errors.hpp"

namespace otx::io {

using json = nlohmann::json;

namespace {

json rect_fields(const Rect& r) {
    return json{{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
}

Rect rect_from(const json& j) {
    return Rect{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(),
                j.at("h").get<int>()};
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<json> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace

void write_bands_record(std::ostream& out, int frame, const std::vector<detect::TextBand>& bands) {
    json jbands = json::array();
    for (const auto& b : bands) {
        json jb = rect_fields(b.rect);
        jb["density"] = b.density;
        jbands.push_back(jb);
    }
    out << json{{"frame", frame}, {"bands", jbands}}.dump() << "\n";
}

std::vector<BandsRecord> read_bands_jsonl(const std::filesystem::path& path) {
    std::vector<BandsRecord> out;
    for (const json& j : read_jsonl(path)) {
        BandsRecord rec;
        rec.frame = j.at("frame").get<int>();
        for (const auto& jb : j.at("bands")) {
            detect::TextBand b;
            b.rect = rect_from(jb);
            b.density = jb.value("density", 0.0);
            rec.bands.push_back(b);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<synth::GtFrame> read_gt_jsonl(const std::filesystem::path& path) {
    std::vector<synth::GtFrame> out;
    for (const json& j : read_jsonl(path)) {
        synth::GtFrame f;
        f.frame = j.at("frame").get<int>();
        for (const auto& jb : j.at("bands")) {
            synth::GtBand b;
            b.rect = rect_from(jb);
            b.track_id = jb.value("track_id", 0);
            b.text = jb.value("text", std::string{});
            f.bands.push_back(std::move(b));
        }
        out.push_back(std::move(f));
    }
    return out;
}

void write_event_record(std::ostream& out, const track::TrackEvent& ev) {
    json rects = json::array();
    for (const Rect& r : ev.rects) rects.push_back({r.x, r.y, r.w, r.h});
    out << json{{"frame", ev.frame},
                {"kind", track::to_string(ev.kind)},
                {"track_ids", ev.track_ids},
                {"rects", rects}}
               .dump()
        << "\n";
}

void write_track_record(std::ostream& out, const track::Track& t) {
    json rects = json::array();
    for (const auto& [frame, r] : t.history) rects.push_back({frame, r.x, r.y, r.w, r.h});
    out << json{{"id", t.id},
                {"start_frame", t.history.front().first},
                {"end_frame", t.history.back().first},
                {"rects", rects}}
               .dump()
        << "\n";
}

std::vector<TrackRecord> read_tracks_jsonl(const std::filesystem::path& path) {
    std::vector<TrackRecord> out;
    for (const json& j : read_jsonl(path)) {
        TrackRecord rec;
        rec.id = j.at("id").get<int>();
        rec.start_frame = j.at("start_frame").get<int>();
        rec.end_frame = j.at("end_frame").get<int>();
        for (const auto& jr : j.at("rects")) {
            rec.rects.emplace_back(jr.at(0).get<int>(),
                                   Rect{jr.at(1).get<int>(), jr.at(2).get<int>(),
                                        jr.at(3).get<int>(), jr.at(4).get<int>()});
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_recognition_record(std::ostream& out, int track_id, const std::string& raw,
                              const std::string& corrected) {
    out << json{{"track_id", track_id}, {"raw", raw}, {"corrected", corrected}}.dump() << "\n";
}

std::vector<RecognitionRecord> read_recognition_jsonl(const std::filesystem::path& path) {
    std::vector<RecognitionRecord> out;
    for (const json& j : read_jsonl(path)) {
        RecognitionRecord rec;
        rec.track_id = j.at("track_id").get<int>();
        rec.raw = j.at("raw").get<std::string>();
        rec.corrected = j.at("corrected").get<std::string>();
        out.push_back(std::move(rec));
    }
    return out;
}

eval::TrackSpan to_span(const TrackRecord& rec) {
    eval::TrackSpan span;
    span.id = rec.id;
    for (const auto& [frame, r] : rec.rects) span.rect_by_frame[frame] = r;
    return span;
}

std::vector<eval::TrackSpan> gt_track_spans(const std::vector<synth::GtFrame>& gt) {
    std::map<int, eval::TrackSpan> by_id;
    for (const auto& f : gt)
        for (const auto& b : f.bands) {
            auto& span = by_id[b.track_id];
            span.id = b.track_id;
            span.rect_by_frame[f.frame] = b.rect;
        }
    std::vector<eval::TrackSpan> out;
    out.reserve(by_id.size());
    for (auto& [id, span] : by_id) out.push_back(std::move(span));
    return out;
}

}  // namespace otx::io
