#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "otx/band_detect.hpp"
#include "otx/eval.hpp"
#include "otx/synth.hpp"
#include "otx/tracker.hpp"

namespace otx::io {

// One detection record per frame: {"frame": n, "bands": [{x,y,w,h,density}]}.
void write_bands_record(std::ostream& out, int frame, const std::vector<detect::TextBand>& bands);

struct BandsRecord {
    int frame = 0;
    std::vector<detect::TextBand> bands;
};

std::vector<BandsRecord> read_bands_jsonl(const std::filesystem::path& path);

// Ground truth records: {"frame": n, "bands": [{x,y,w,h,track_id,text?}]}.
std::vector<synth::GtFrame> read_gt_jsonl(const std::filesystem::path& path);

void write_event_record(std::ostream& out, const track::TrackEvent& ev);

// Finalized track: {"id", "start_frame", "end_frame", "rects": [[frame,x,y,w,h],...]}.
void write_track_record(std::ostream& out, const track::Track& track);

struct TrackRecord {
    int id = 0;
    int start_frame = 0;
    int end_frame = 0;
    std::vector<std::pair<int, Rect>> rects;
};

std::vector<TrackRecord> read_tracks_jsonl(const std::filesystem::path& path);

// {"track_id", "raw", "corrected"}.
void write_recognition_record(std::ostream& out, int track_id, const std::string& raw,
                              const std::string& corrected);

struct RecognitionRecord {
    int track_id = 0;
    std::string raw;
    std::string corrected;
};

std::vector<RecognitionRecord> read_recognition_jsonl(const std::filesystem::path& path);

eval::TrackSpan to_span(const TrackRecord& rec);
std::vector<eval::TrackSpan> gt_track_spans(const std::vector<synth::GtFrame>& gt);

}  // namespace otx::io
