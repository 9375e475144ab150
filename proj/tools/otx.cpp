#include <optional>
#include <string>

#include <CLI11.hpp>

#include "otx/cli.hpp"

namespace {

// Flags shared by every subcommand; values override the config file.
void add_config_flags(CLI::App* cmd, otx::Config& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--eta-fo", cfg.eta_fo, "RCC-5 fractional-overlap tolerance (0,0.5)");
    cmd->add_option("--epsilon", cfg.epsilon, "CCA gap tolerance in profile indices");
    cmd->add_option("--hist-match", cfg.hist_match, "color histogram match floor (0,1]");
    cmd->add_option("--max-misses", cfg.max_misses, "restored frames before termination");
    cmd->add_option("--min-track-age", cfg.min_track_age,
                    "frames a track must live to be emitted");
    cmd->add_option("--min-band-w", cfg.min_band_w, "minimum band width in px");
    cmd->add_option("--min-band-h", cfg.min_band_h, "minimum band height in px");
    cmd->add_option("--ocr-cmd", cfg.ocr_cmd, "OCR command template with {img}");
    cmd->add_option("--ocr-timeout", cfg.ocr_timeout_s, "OCR command timeout in seconds");
    cmd->add_option("--ocr-jobs", cfg.ocr_jobs, "concurrent OCR process cap");
    cmd->add_option("--wordlist", cfg.wordlist, "dictionary file, one token per line");
    cmd->add_option("--max-edit", cfg.max_edit, "correction edit-distance radius (1 or 2)");
    cmd->add_option("--debug-dir", cfg.debug_dir, "write intermediate maps and band JSON here");
    cmd->add_option("--threads", cfg.threads, "detection worker threads");
    cmd->add_option("--seed", cfg.seed, "random seed (synth)");
    cmd->add_flag("--no-enhance", [&cfg](std::int64_t) { cfg.enhance = false; },
                  "skip contrast enhancement (plain gradient profiles)");
}

// Re-parse precedence: file values first, explicit flags win.
otx::Config merge_config(const CLI::App* cmd, const otx::Config& flag_values,
                         const std::string& config_path) {
    if (config_path.empty()) return flag_values;
    otx::Config merged = otx::Config::from_file(config_path, false);
    auto take = [&](const char* name, auto member) {
        if (cmd->count(name) > 0) merged.*member = flag_values.*member;
    };
    take("--eta-fo", &otx::Config::eta_fo);
    take("--epsilon", &otx::Config::epsilon);
    take("--hist-match", &otx::Config::hist_match);
    take("--max-misses", &otx::Config::max_misses);
    take("--min-track-age", &otx::Config::min_track_age);
    take("--min-band-w", &otx::Config::min_band_w);
    take("--min-band-h", &otx::Config::min_band_h);
    take("--ocr-cmd", &otx::Config::ocr_cmd);
    take("--ocr-timeout", &otx::Config::ocr_timeout_s);
    take("--ocr-jobs", &otx::Config::ocr_jobs);
    take("--wordlist", &otx::Config::wordlist);
    take("--max-edit", &otx::Config::max_edit);
    take("--debug-dir", &otx::Config::debug_dir);
    take("--threads", &otx::Config::threads);
    take("--seed", &otx::Config::seed);
    if (cmd->count("--no-enhance") > 0) merged.enhance = flag_values.enhance;
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"otx: overlay text band detection, tracking and extraction"};
    app.require_subcommand(1);

    otx::cli::DetectOptions detect_opt;
    otx::cli::TrackOptions track_opt;
    otx::cli::ExtractOptions extract_opt;
    otx::cli::EvalOptions eval_opt;
    otx::cli::SynthOptions synth_opt;
    std::string detect_cfg_path, track_cfg_path, extract_cfg_path, eval_cfg_path, synth_cfg_path;

    auto* detect = app.add_subcommand("detect", "detect text bands per frame");
    detect->add_option("--input", detect_opt.input, "frame directory or '-' for stdin stream")
        ->required();
    detect->add_option("--output", detect_opt.output, "bands JSONL ('-' for stdout)")->required();
    detect->add_option("--timing-out", detect_opt.timing_out, "per-frame wall times JSONL");
    add_config_flags(detect, detect_opt.config, detect_cfg_path);

    auto* track = app.add_subcommand("track", "detect and track bands over a sequence");
    track->add_option("--input", track_opt.input, "frame directory or '-' for stdin stream")
        ->required();
    track->add_option("--output-dir", track_opt.output_dir, "tracks.jsonl, events.jsonl, bands/")
        ->required();
    track->add_option("--detections", track_opt.detections,
                      "precomputed bands JSONL (tracker-only mode)");
    add_config_flags(track, track_opt.config, track_cfg_path);

    auto* extract = app.add_subcommand("extract", "OCR accumulated bands and correct text");
    extract->add_option("--tracks-dir", extract_opt.tracks_dir, "cmd_track output directory")
        ->required();
    extract->add_option("--output", extract_opt.output, "recognition JSONL ('-' for stdout)")
        ->required();
    extract->add_flag("--correct", extract_opt.correct, "require dictionary correction");
    add_config_flags(extract, extract_opt.config, extract_cfg_path);

    auto* eval = app.add_subcommand("eval", "score detections, tracks and recognition vs GT");
    eval->add_option("--pred", eval_opt.pred, "detection JSONL")->required();
    eval->add_option("--gt", eval_opt.gt, "ground-truth JSONL")->required();
    eval->add_option("--tracks", eval_opt.tracks, "tracks JSONL");
    eval->add_option("--rec", eval_opt.rec, "recognition JSONL (requires --tracks)");
    eval->add_option("--report", eval_opt.report, "write JSON report here");
    add_config_flags(eval, eval_opt.config, eval_cfg_path);

    auto* synth = app.add_subcommand("synth", "render a synthetic corpus from a spec");
    synth->add_option("--spec", synth_opt.spec_path, "synth spec JSON")->required();
    synth->add_option("--output-dir", synth_opt.output_dir, "corpus directory")->required();
    synth->add_option("--format", synth_opt.format, "frame format: ppm or png");
    add_config_flags(synth, synth_opt.config, synth_cfg_path);

    CLI11_PARSE(app, argc, argv);

    return otx::cli::run_guarded([&]() -> int {
        if (detect->parsed()) {
            detect_opt.config = merge_config(detect, detect_opt.config, detect_cfg_path);
            return otx::cli::cmd_detect(detect_opt);
        }
        if (track->parsed()) {
            track_opt.config = merge_config(track, track_opt.config, track_cfg_path);
            return otx::cli::cmd_track(track_opt);
        }
        if (extract->parsed()) {
            extract_opt.config = merge_config(extract, extract_opt.config, extract_cfg_path);
            return otx::cli::cmd_extract(extract_opt);
        }
        if (eval->parsed()) {
            eval_opt.config = merge_config(eval, eval_opt.config, eval_cfg_path);
            return otx::cli::cmd_eval(eval_opt);
        }
        if (synth->parsed()) {
            synth_opt.config = merge_config(synth, synth_opt.config, synth_cfg_path);
            if (synth->count("--seed") > 0) synth_opt.seed = synth_opt.config.seed;
            return otx::cli::cmd_synth(synth_opt);
        }
        return otx::cli::kExitConfig;
    });
}
