#include "fded/edge_fusion.hpp"
#include "fded/io_formats.hpp"
#include "fded/losses.hpp"
#include "fded/manifest.hpp"
#include "fded/report.hpp"
#include "fded/run_config.hpp"
#include "fded/scene_synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(const char* prefix, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d.%s", prefix, index, ext);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fded::FormatError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw fded::FormatError(path.string() + ": write failed");
}

fded::SequenceManifest load_sequence_dir(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.json")) {
        throw fded::ConfigError(dir.string() + ": no manifest.json found");
    }
    return fded::load_manifest(dir);
}

// Resolves the background sentinel: the config wins when it pinned one,
// otherwise the manifest's value is used.
void apply_sentinel(fded::RunConfig& cfg, const fded::SequenceManifest& manifest) {
    if (!cfg.sentinel_from_config) {
        cfg.pipeline.threshold.background_sentinel = manifest.background_sentinel;
    }
}

struct TruthData {
    std::vector<fded::EdgeMap> oracle;
    std::vector<fded::EdgeMap> occb;
    std::vector<double> rates;
    bool has_occb = false;
};

TruthData load_truth(const fs::path& dir, const fded::SequenceManifest& manifest) {
    TruthData t;
    t.has_occb = true;
    for (const fded::FrameEntry& e : manifest.frames) {
        if (e.oracle_edges.empty()) {
            throw fded::ConfigError(dir.string() + ": frame " + std::to_string(e.index) +
                                    " has no oracle_edges entry");
        }
        t.oracle.push_back(fded::read_edge_map(dir / e.oracle_edges));
        if (e.occluded_boundary.empty()) {
            t.has_occb = false;
        } else {
            t.occb.push_back(fded::read_edge_map(dir / e.occluded_boundary));
        }
        t.rates.push_back(e.occlusion_rate);
    }
    return t;
}

std::vector<fded::EdgeMap> run_pipeline_edges(const fs::path& dir,
                                              const fded::SequenceManifest& manifest,
                                              const fded::RunConfig& cfg) {
    const auto records = fded::load_frame_records(dir, manifest);
    const auto bundles = fded::run_pipeline(records, cfg.pipeline);
    std::vector<fded::EdgeMap> edges;
    edges.reserve(bundles.size());
    for (const auto& b : bundles) edges.push_back(b.e);
    return edges;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
    fded::SceneSpec spec = fded::load_scene_spec(spec_path);
    if (seed) spec.seed = *seed;
    const auto truths = fded::render_sequence(spec);
    fded::save_sequence(out_dir, spec, truths);
    std::cout << "wrote " << truths.size() << " frames to " << out_dir << "\n";
    return 0;
}

int cmd_detect(const std::string& in_dir, const std::string& out_dir, int w,
               std::optional<double> sigma, std::optional<double> offset) {
    const auto manifest = load_sequence_dir(in_dir);
    fded::AdaptiveThresholdParams params;
    params.window = w;
    params.sigma = sigma;
    params.offset_c = offset;
    params.background_sentinel = manifest.background_sentinel;
    fs::create_directories(out_dir);
    for (const fded::FrameEntry& e : manifest.frames) {
        const fded::ScalarGrid depth = fded::read_float_grid(fs::path(in_dir) / e.depth);
        const fded::EdgeMap d = fded::depth_edge_detect(depth, params);
        fded::write_edge_map(fs::path(out_dir) / frame_name("d", e.index, "pgm"), d);
    }
    std::cout << "wrote depth edges for " << manifest.frames.size() << " frames\n";
    return 0;
}

int cmd_flow(const std::string& in_dir, const std::string& out_dir) {
    const auto manifest = load_sequence_dir(in_dir);
    const auto records = fded::load_frame_records(in_dir, manifest);
    fs::create_directories(out_dir);
    const fded::FlowParams params;
    for (size_t i = 0; i + 1 < records.size(); ++i) {
        const fded::FlowField v = fded::estimate_flow(fded::luminance(records[i].rgb),
                                                      fded::luminance(records[i + 1].rgb), params);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "flow_%04d_%04d.flo", static_cast<int>(i),
                      static_cast<int>(i + 1));
        fded::write_flow(fs::path(out_dir) / buf, v);
    }
    std::cout << "wrote " << (records.size() > 0 ? records.size() - 1 : 0) << " flow fields\n";
    return 0;
}

int cmd_pipeline(const std::string& in_dir, const std::string& out_dir,
                 const std::string& config_path) {
    const auto manifest = load_sequence_dir(in_dir);
    fded::RunConfig cfg = fded::load_run_config(config_path);
    apply_sentinel(cfg, manifest);

    const auto records = fded::load_frame_records(in_dir, manifest);
    const auto bundles = fded::run_pipeline(records, cfg.pipeline);

    fs::create_directories(out_dir);
    json diag;
    diag["version"] = "fded-diag/1";
    json per_frame = json::array();
    for (size_t i = 0; i < bundles.size(); ++i) {
        const fded::EdgeBundle& b = bundles[i];
        const int idx = static_cast<int>(i);
        fded::write_edge_map(fs::path(out_dir) / frame_name("d", idx, "pgm"), b.d);
        fded::write_edge_map(fs::path(out_dir) / frame_name("f", idx, "pgm"), b.f);
        fded::write_edge_map(fs::path(out_dir) / frame_name("e", idx, "pgm"), b.e);
        per_frame.push_back({{"frame", idx},
                             {"source_frame", b.source_frame},
                             {"chain_length", b.chain_length},
                             {"dropped_points", b.dropped_points},
                             {"d_pixels", b.d.count()},
                             {"f_pixels", b.f.count()},
                             {"e_pixels", b.e.count()}});
    }
    diag["per_frame"] = per_frame;
    diag["config_echo"] = json::parse(fded::run_config_to_json_text(cfg));
    if (cfg.pipeline.emit_diagnostics) {
        write_text(fs::path(out_dir) / "diagnostics.json", diag.dump(2) + "\n");
    }
    write_text(fs::path(out_dir) / "config_echo.json", fded::run_config_to_json_text(cfg));
    std::cout << "wrote edge bundles for " << bundles.size() << " frames\n";
    return 0;
}

int cmd_train_toy(const std::string& in_dir, int iters, double lr, bool no_contrastive,
                  std::uint64_t seed, const std::string& out_path) {
    const auto manifest = load_sequence_dir(in_dir);
    const fded::FrameEntry& frame0 = manifest.frames.at(0);
    if (frame0.clean.empty()) {
        throw fded::ConfigError(in_dir + ": frame 0 has no clean (drawing-style) image");
    }
    const auto z_img = fded::read_rgb(fs::path(in_dir) / frame0.rgb);
    const auto x_img = fded::read_rgb(fs::path(in_dir) / frame0.clean);
    const fded::ScalarGrid depth = fded::read_float_grid(fs::path(in_dir) / frame0.depth);

    fded::AdaptiveThresholdParams tparams;
    tparams.background_sentinel = manifest.background_sentinel;
    const fded::EdgeMap e = fded::depth_edge_detect(depth, tparams);

    fded::RunConfig cfg;
    cfg.loss.rng_seed = seed;
    const fded::PatchSet z = fded::patchify(z_img, e, cfg.patch_px);
    const fded::PatchSet x = fded::patchify(x_img, e, cfg.patch_px);
    const std::vector<double> e_patches = fded::patchify_edge_channel(e, cfg.patch_px);

    const fded::TrainResult result =
        fded::train_toy(z, e_patches, x, cfg.loss, lr, iters, !no_contrastive, seed);

    json j;
    j["version"] = "fded-train/1";
    j["seed"] = seed;
    j["iters"] = iters;
    j["lr"] = lr;
    j["use_contrastive"] = !no_contrastive;
    j["patch_px"] = cfg.patch_px;
    j["recon_history"] = result.recon_history;
    j["final_recon"] = result.recon_history.back();
    write_text(out_path, j.dump(2) + "\n");
    std::cout << "final recon loss " << result.recon_history.back() << " after " << iters
              << " iterations\n";
    return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& truth_dir, int tol,
             const std::string& out_path) {
    const auto manifest = load_sequence_dir(truth_dir);
    const TruthData truth = load_truth(truth_dir, manifest);

    std::vector<fded::EdgeMap> pred;
    for (const fded::FrameEntry& e : manifest.frames) {
        fs::path p = fs::path(pred_dir) / frame_name("e", e.index, "pgm");
        if (!fs::exists(p)) p = fs::path(pred_dir) / frame_name("d", e.index, "pgm");
        if (!fs::exists(p)) {
            throw fded::ConfigError(pred_dir + ": no e_ or d_ map for frame " +
                                    std::to_string(e.index));
        }
        pred.push_back(fded::read_edge_map(p));
    }

    fded::RunConfig echo;
    echo.metric_tolerance = tol;
    const fded::SequenceEvaluation eval = fded::evaluate_sequence(
        pred, truth.oracle, truth.has_occb ? &truth.occb : nullptr, truth.rates, tol);
    write_text(out_path, fded::report_to_json_text(eval, echo));
    std::cout << "mean f1 " << eval.mean_f1 << ", temporal consistency "
              << eval.temporal_consistency << "\n";
    return 0;
}

int cmd_sweep(const std::string& in_dir, const std::string& w_list, const std::string& h_list,
              const std::string& config_path, const std::string& out_path) {
    const auto manifest = load_sequence_dir(in_dir);
    const TruthData truth = load_truth(in_dir, manifest);

    std::vector<int> windows;
    {
        std::stringstream ss(w_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) windows.push_back(std::stoi(tok));
        }
    }
    std::vector<std::string> interps;
    {
        std::stringstream ss(h_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) interps.push_back(tok);
        }
    }
    if (windows.empty() || interps.empty()) {
        throw fded::ParamError("sweep: --w and --h must be non-empty lists");
    }

    fded::RunConfig base;
    if (!config_path.empty()) base = fded::load_run_config(config_path);
    apply_sentinel(base, manifest);

    json cells = json::array();
    for (int w : windows) {
        for (const std::string& h : interps) {
            fded::RunConfig cfg = base;
            cfg.pipeline.threshold.window = w;
            if (h == "dilation") {
                cfg.pipeline.flow_edge.interpolation = fded::EdgeInterpolation::kDilation;
            } else if (h == "spline") {
                cfg.pipeline.flow_edge.interpolation = fded::EdgeInterpolation::kSpline;
            } else {
                throw fded::ParamError("sweep: unknown interpolation '" + h + "'");
            }
            const auto edges = run_pipeline_edges(in_dir, manifest, cfg);
            const auto eval = fded::evaluate_sequence(
                edges, truth.oracle, truth.has_occb ? &truth.occb : nullptr, truth.rates,
                base.metric_tolerance);
            cells.push_back({{"w", w},
                             {"h", h},
                             {"mean_f1", eval.mean_f1},
                             {"mean_precision", eval.mean_precision},
                             {"mean_recall", eval.mean_recall},
                             {"temporal_consistency", eval.temporal_consistency}});
            std::cout << "w=" << w << " h=" << h << " f1=" << eval.mean_f1 << "\n";
        }
    }
    json j;
    j["version"] = "fded-sweep/1";
    j["cells"] = cells;
    j["config_echo"] = json::parse(fded::run_config_to_json_text(base));
    write_text(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow-depth edge detection pipeline for animation sequences"};
    app.require_subcommand(1);

    std::string spec_path, in_dir, out_dir, config_path, pred_dir, truth_dir, out_path;
    std::string w_list = "7,9,11,13", h_list = "dilation,spline";
    std::optional<std::uint64_t> seed_opt;
    std::uint64_t seed = 0;
    int w = 9, tol = 2, iters = 200;
    double lr = 1e-3;
    std::optional<double> sigma, offset;
    bool no_contrastive = false;

    CLI::App* synth = app.add_subcommand("synth", "Render a synthetic sequence with ground truth");
    synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--seed", seed_opt, "Override the spec's seed");

    CLI::App* detect = app.add_subcommand("detect", "Depth-based edges per frame");
    detect->add_option("--in", in_dir, "Sequence directory")->required();
    detect->add_option("--out", out_dir, "Output directory")->required();
    detect->add_option("-w,--window", w, "Adaptive threshold window");
    detect->add_option("--sigma", sigma, "Gaussian sigma (default w/4)");
    detect->add_option("--offset", offset, "Threshold offset (default 1e-3 * depth range)");

    CLI::App* flow = app.add_subcommand("flow", "Pairwise optical flow files");
    flow->add_option("--in", in_dir, "Sequence directory")->required();
    flow->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* pipeline = app.add_subcommand("pipeline", "Full flow-depth edge detection");
    pipeline->add_option("--in", in_dir, "Sequence directory")->required();
    pipeline->add_option("--out", out_dir, "Output directory")->required();
    pipeline->add_option("--config", config_path, "Run config JSON")->required();

    CLI::App* train = app.add_subcommand("train-toy", "Train the toy patch stylizer");
    train->add_option("--in", in_dir, "Sequence directory")->required();
    train->add_option("--iters", iters, "Gradient descent iterations");
    train->add_option("--lr", lr, "Learning rate");
    train->add_flag("--no-contrastive", no_contrastive, "Reconstruction loss only");
    train->add_option("--seed", seed, "Training seed");
    train->add_option("--out", out_path, "Output JSON")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "Score predicted edges against ground truth");
    eval_cmd->add_option("--pred", pred_dir, "Directory with e_*.pgm (or d_*.pgm)")->required();
    eval_cmd->add_option("--truth", truth_dir, "Sequence directory with oracle edges")->required();
    eval_cmd->add_option("--tol", tol, "Matching tolerance in pixels");
    eval_cmd->add_option("--out", out_path, "Output JSON")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Ablation grid over window size and interpolation");
    sweep->add_option("--in", in_dir, "Sequence directory")->required();
    sweep->add_option("--w", w_list, "Comma-separated window sizes");
    sweep->add_option("--h", h_list, "Comma-separated interpolations (dilation,spline)");
    sweep->add_option("--config", config_path, "Base run config JSON");
    sweep->add_option("--out", out_path, "Output JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec_path, out_dir, seed_opt);
        if (detect->parsed()) return cmd_detect(in_dir, out_dir, w, sigma, offset);
        if (flow->parsed()) return cmd_flow(in_dir, out_dir);
        if (pipeline->parsed()) return cmd_pipeline(in_dir, out_dir, config_path);
        if (train->parsed()) return cmd_train_toy(in_dir, iters, lr, no_contrastive, seed, out_path);
        if (eval_cmd->parsed()) return cmd_eval(pred_dir, truth_dir, tol, out_path);
        if (sweep->parsed()) return cmd_sweep(in_dir, w_list, h_list, config_path, out_path);
    } catch (const fded::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const fded::ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
