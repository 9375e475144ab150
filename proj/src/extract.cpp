#include "otx/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "otx/errors.hpp"
#include "otx/image_io.hpp"
#include "otx/preprocess.hpp"
#include "otx/subprocess.hpp"

namespace otx::extract {

BinaryImage binarize_band(const ColorImage& frame, const Rect& rect) {
    if (area(rect) <= 0 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > frame.width ||
        rect.y + rect.h > frame.height)
        throw std::invalid_argument("binarize_band: bad rect");

    const ColorImage sub = crop(frame, rect);
    GrayFrame gray;
    gray.width = sub.width;
    gray.height = sub.height;
    gray.lum.resize(static_cast<std::size_t>(sub.width) * sub.height);
    for (std::size_t i = 0; i < gray.lum.size(); ++i) {
        const std::uint8_t* p = &sub.rgb[3 * i];
        gray.lum[i] = static_cast<float>((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0);
    }

    std::array<std::uint64_t, 256> hist{};
    int populated = 0;
    for (float v : gray.lum) {
        int b = static_cast<int>(v * 256.f);
        if (b > 255) b = 255;
        if (hist[b]++ == 0) ++populated;
    }
    BinaryImage out(rect.w, rect.h);
    if (populated <= 1) return out;  // single-level band, nothing to separate

    const double level = preprocess::otsu_threshold(hist);

    // Foreground = the class whose pixels sit on denser edges.
    const GradientMap grad = preprocess::scharr_gradient(gray);
    double edge_low = 0.0, edge_high = 0.0;
    std::uint64_t n_low = 0, n_high = 0;
    for (std::size_t i = 0; i < gray.lum.size(); ++i) {
        if (gray.lum[i] <= level) {
            edge_low += grad.mag[i];
            ++n_low;
        } else {
            edge_high += grad.mag[i];
            ++n_high;
        }
    }
    const double mean_low = n_low ? edge_low / static_cast<double>(n_low) : 0.0;
    const double mean_high = n_high ? edge_high / static_cast<double>(n_high) : 0.0;
    bool fg_is_high;
    if (mean_high > mean_low)
        fg_is_high = true;
    else if (mean_high < mean_low)
        fg_is_high = false;
    else
        fg_is_high = n_high <= n_low;  // tie: minority class is the text

    for (std::size_t i = 0; i < gray.lum.size(); ++i) {
        const bool high = gray.lum[i] > level;
        out.bits[i] = (high == fg_is_high) ? 1 : 0;
    }
    return out;
}

std::pair<int, int> canonical_size(std::span<const Rect> rects) {
    if (rects.empty()) throw std::invalid_argument("canonical_size: no rects");
    std::vector<int> ws, hs;
    ws.reserve(rects.size());
    hs.reserve(rects.size());
    for (const Rect& r : rects) {
        ws.push_back(r.w);
        hs.push_back(r.h);
    }
    const std::size_t mid = (rects.size() - 1) / 2;
    std::nth_element(ws.begin(), ws.begin() + mid, ws.end());
    std::nth_element(hs.begin(), hs.begin() + mid, hs.end());
    return {ws[mid], hs[mid]};
}

AccumulatedBand accumulate(std::span<const BinaryImage> frames, int width, int height) {
    if (frames.empty()) throw std::invalid_argument("accumulate: no frames");
    if (width <= 0 || height <= 0) throw std::invalid_argument("accumulate: bad size");

    AccumulatedBand acc;
    acc.width = width;
    acc.height = height;
    acc.n = static_cast<int>(frames.size());
    acc.votes.assign(static_cast<std::size_t>(width) * height, 0.f);

    for (const BinaryImage& f : frames) {
        for (int y = 0; y < height; ++y) {
            const int sy = std::min(f.height - 1, y * f.height / height);
            for (int x = 0; x < width; ++x) {
                const int sx = std::min(f.width - 1, x * f.width / width);
                acc.votes[static_cast<std::size_t>(y) * width + x] += f.at(sx, sy);
            }
        }
    }
    const float inv = 1.f / static_cast<float>(acc.n);
    acc.final = BinaryImage(width, height);
    for (std::size_t i = 0; i < acc.votes.size(); ++i) {
        acc.votes[i] *= inv;
        acc.final.bits[i] = acc.votes[i] >= 0.5f ? 1 : 0;
    }
    return acc;
}

std::string run_ocr(const AccumulatedBand& acc, const std::string& command_template,
                    double timeout_s, const std::filesystem::path& workdir) {
    if (command_template.empty()) throw config_error("OCR command not configured");
    if (command_template.find("{img}") == std::string::npos)
        throw config_error("OCR command template lacks {img} placeholder");

    std::filesystem::create_directories(workdir);
    const auto img_path = workdir / "band.pgm";
    std::vector<std::uint8_t> gray(acc.final.bits.size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = acc.final.bits[i] ? 0 : 255;  // dark text on white page
    io::write_pgm(img_path, acc.width, acc.height, gray);

    std::string cmd = command_template;
    const std::string placeholder = "{img}";
    for (std::size_t pos = cmd.find(placeholder); pos != std::string::npos;
         pos = cmd.find(placeholder, pos))
        cmd.replace(pos, placeholder.size(), img_path.string());

    const proc::CommandResult r = proc::run_command(cmd, timeout_s);
    if (r.timed_out) throw command_error("OCR command timed out: " + cmd);
    if (r.exit_code != 0)
        throw command_error("OCR command failed (exit " + std::to_string(r.exit_code) +
                            "): " + r.err);
    return r.out;
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open wordlist " + path.string());
    Dictionary dict;
    dict.source = path;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' '))
            line.pop_back();
        if (line.empty()) continue;
        for (auto& c : line) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        dict.words.insert(line);
    }
    if (dict.words.empty()) throw config_error("wordlist is empty: " + path.string());
    return dict;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = b.size();
    std::vector<std::size_t> row(n + 1);
    for (std::size_t j = 0; j <= n; ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[n];
}

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_alpha(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::string dictionary_correct(const std::string& raw, const Dictionary& dict, int max_edit) {
    if (max_edit != 1 && max_edit != 2) throw std::invalid_argument("max_edit must be 1 or 2");

    std::istringstream in(raw);
    std::string token;
    std::string out;
    bool first = true;
    while (in >> token) {
        // Peel leading/trailing punctuation; correct only all-letter cores.
        std::size_t b = 0, e = token.size();
        while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
        while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
        const std::string core = token.substr(b, e - b);

        std::string replaced = token;
        if (all_alpha(core)) {
            const std::string folded = to_lower(core);
            if (!dict.contains(folded)) {
                std::size_t best = static_cast<std::size_t>(max_edit) + 1;
                const std::string* pick = nullptr;
                for (const auto& w : dict.words) {  // sorted: first hit at a distance wins ties
                    const std::size_t len_a = folded.size(), len_b = w.size();
                    const std::size_t diff = len_a > len_b ? len_a - len_b : len_b - len_a;
                    if (diff >= best) continue;  // distance >= length gap, cannot improve
                    const std::size_t d = levenshtein(folded, w);
                    if (d < best) {
                        best = d;
                        pick = &w;
                    }
                }
                if (pick) replaced = token.substr(0, b) + *pick + token.substr(e);
            }
        }
        if (!first) out += ' ';
        out += replaced;
        first = false;
    }
    return out;
}

std::pair<double, double> error_rates(const std::string& hypothesis, const std::string& reference) {
    if (reference.empty()) throw std::invalid_argument("error_rates: empty reference");

    const double cer = static_cast<double>(levenshtein(hypothesis, reference)) /
                       static_cast<double>(reference.size());

    auto tokens = [](const std::string& s) {
        std::istringstream in(s);
        std::vector<std::string> out;
        std::string t;
        while (in >> t) out.push_back(t);
        return out;
    };
    const auto hyp = tokens(hypothesis);
    const auto ref = tokens(reference);
    if (ref.empty()) throw std::invalid_argument("error_rates: reference has no tokens");

    // Token-level Levenshtein.
    std::vector<std::size_t> row(ref.size() + 1);
    for (std::size_t j = 0; j <= ref.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= hyp.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = (hyp[i - 1] == ref[j - 1]) ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    const double wer = static_cast<double>(row[ref.size()]) / static_cast<double>(ref.size());
    return {cer, wer};
}

}  // namespace otx::extract
