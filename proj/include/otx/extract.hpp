#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "otx/image.hpp"

namespace otx::extract {

// Otsu binarization of the band luminance, polarity picked so the
// foreground class carries the higher mean edge density. Single-level
// bands come back all-zero.
BinaryImage binarize_band(const ColorImage& frame, const Rect& rect);

struct AccumulatedBand {
    int width = 0;
    int height = 0;
    int n = 0;                 // frames accumulated
    std::vector<float> votes;  // per-pixel mean of aligned binarizations
    BinaryImage final;         // votes >= 0.5
};

// Lower median of the per-frame rect sizes; the alignment target.
std::pair<int, int> canonical_size(std::span<const Rect> rects);

// Nearest-neighbor resample of every frame onto width x height, then a
// per-pixel majority vote. Throws std::invalid_argument when empty.
AccumulatedBand accumulate(std::span<const BinaryImage> frames, int width, int height);

// Writes acc.final as a PGM (foreground black on white), substitutes the
// path for every "{img}" in the command template, runs it and returns
// captured stdout. Throws command_error on nonzero exit or timeout and
// config_error when the template is missing "{img}".
std::string run_ocr(const AccumulatedBand& acc, const std::string& command_template,
                    double timeout_s, const std::filesystem::path& workdir);

struct Dictionary {
    std::set<std::string> words;  // lowercase tokens, sorted
    std::filesystem::path source;

    static Dictionary load(const std::filesystem::path& path);
    bool contains(const std::string& lowercase_word) const { return words.count(lowercase_word) > 0; }
};

std::size_t levenshtein(std::string_view a, std::string_view b);

// Per-token correction: in-dictionary tokens (case-folded) are kept, others
// are replaced by the nearest dictionary word within max_edit (ties go to
// the lexicographically smallest). Tokens with digits or other non-letter
// cores pass through. max_edit must be 1 or 2.
std::string dictionary_correct(const std::string& raw, const Dictionary& dict, int max_edit);

// (CER, WER): character/token Levenshtein distance over reference length.
// Throws std::invalid_argument for an empty reference.
std::pair<double, double> error_rates(const std::string& hypothesis, const std::string& reference);

}  // namespace otx::extract
