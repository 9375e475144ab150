#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "otx/config.hpp"

namespace otx::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitCommand = 3;

struct DetectOptions {
    std::string input;        // frame directory, or "-" for a netpbm stream on stdin
    std::string output;       // bands JSONL path, or "-" for stdout
    std::string timing_out;   // optional per-frame wall-time JSONL
    Config config;
};

struct TrackOptions {
    std::string input;
    std::filesystem::path output_dir;  // tracks.jsonl, events.jsonl, bands/
    std::string detections;            // optional precomputed bands JSONL
    Config config;
};

struct ExtractOptions {
    std::filesystem::path tracks_dir;  // cmd_track output directory
    std::string output;                // recognition JSONL path, or "-"
    bool correct = false;              // require dictionary correction
    Config config;
};

struct EvalOptions {
    std::string pred;    // detection JSONL
    std::string gt;      // ground-truth JSONL
    std::string tracks;  // optional tracks JSONL
    std::string rec;     // optional recognition JSONL (needs tracks)
    std::string report;  // optional JSON report path
    Config config;
};

struct SynthOptions {
    std::filesystem::path spec_path;
    std::filesystem::path output_dir;
    std::string format = "ppm";
    std::optional<std::uint64_t> seed;  // overrides the spec seed
    Config config;
};

int cmd_detect(const DetectOptions& opt);
int cmd_track(const TrackOptions& opt);
int cmd_extract(const ExtractOptions& opt);
int cmd_eval(const EvalOptions& opt);
int cmd_synth(const SynthOptions& opt);

// Maps thrown otx errors onto the exit-code contract.
int run_guarded(const std::function<int()>& body);

}  // namespace otx::cli
