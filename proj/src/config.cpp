#include "otx/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "otx/errors.hpp"

namespace otx {

using json = nlohmann::json;

void Config::validate() const {
    if (!(eta_fo > 0.0 && eta_fo < 0.5)) throw config_error("eta_fo must lie in (0, 0.5)");
    if (epsilon < 0) throw config_error("epsilon must be >= 0");
    if (!(hist_match > 0.0 && hist_match <= 1.0))
        throw config_error("hist_match must lie in (0, 1]");
    if (max_misses < 0) throw config_error("max_misses must be >= 0");
    if (min_track_age < 1) throw config_error("min_track_age must be >= 1");
    if (min_band_w < 1 || min_band_h < 1) throw config_error("minimum band size must be >= 1");
    if (ocr_timeout_s <= 0.0) throw config_error("ocr_timeout must be positive");
    if (ocr_jobs < 1) throw config_error("ocr_jobs must be >= 1");
    if (max_edit != 1 && max_edit != 2) throw config_error("max_edit must be 1 or 2");
    if (threads < 1) throw config_error("threads must be >= 1");
}

Config Config::from_file(const std::filesystem::path& path, bool validate_now) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("config parse error: " + std::string(e.what()));
    }
    Config c;
    c.eta_fo = j.value("eta_fo", c.eta_fo);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.hist_match = j.value("hist_match", c.hist_match);
    c.max_misses = j.value("max_misses", c.max_misses);
    c.min_track_age = j.value("min_track_age", c.min_track_age);
    c.min_band_w = j.value("min_band_w", c.min_band_w);
    c.min_band_h = j.value("min_band_h", c.min_band_h);
    c.enhance = j.value("enhance", c.enhance);
    c.ocr_cmd = j.value("ocr_cmd", c.ocr_cmd);
    c.ocr_timeout_s = j.value("ocr_timeout", c.ocr_timeout_s);
    c.ocr_jobs = j.value("ocr_jobs", c.ocr_jobs);
    c.wordlist = j.value("wordlist", c.wordlist);
    c.max_edit = j.value("max_edit", c.max_edit);
    c.debug_dir = j.value("debug_dir", c.debug_dir);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    if (validate_now) c.validate();
    return c;
}

}  // namespace otx
