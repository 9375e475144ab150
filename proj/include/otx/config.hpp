#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace otx {

// Pipeline configuration; file values are overridden by CLI flags.
struct Config {
    double eta_fo = 0.1;       // RCC-5 fractional-overlap tolerance, (0, 0.5)
    int epsilon = 2;           // 1-D CCA gap tolerance, >= 0
    double hist_match = 0.8;   // color-histogram intersection floor, (0, 1]
    int max_misses = 5;        // consecutive restores before termination
    int min_track_age = 3;     // frames a track must live to be emitted
    int min_band_w = 16;
    int min_band_h = 8;
    bool enhance = true;       // contrast enhancement before detection
    std::string ocr_cmd;       // external command template with {img}
    double ocr_timeout_s = 10.0;
    int ocr_jobs = 4;          // concurrent OCR process cap
    std::string wordlist;      // dictionary path; enables correction
    int max_edit = 2;          // Levenshtein radius for correction, 1 or 2
    std::string debug_dir;
    int threads = 1;
    std::uint64_t seed = 1;

    // Throws config_error when a value is outside its documented range.
    void validate() const;

    // validate_now=false defers range checks so CLI flags can fix
    // out-of-range file values before the effective config is used.
    static Config from_file(const std::filesystem::path& path, bool validate_now = true);
};

}  // namespace otx
