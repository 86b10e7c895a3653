#include "fded/run_config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace fded {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open for reading");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw FormatError(origin + ": invalid JSON");
    check_keys(j, {"version", "seed", "threshold", "flow", "flow_edge", "loss", "metrics"},
               origin);

    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);

    if (j.contains("threshold")) {
        const json& t = j["threshold"];
        check_keys(t, {"w", "sigma", "offset_c", "background_sentinel", "symmetric"},
                   origin + ".threshold");
        AdaptiveThresholdParams& p = cfg.pipeline.threshold;
        p.window = t.value("w", p.window);
        if (t.contains("sigma")) p.sigma = t["sigma"].get<double>();
        if (t.contains("offset_c")) p.offset_c = t["offset_c"].get<double>();
        if (t.contains("background_sentinel")) {
            p.background_sentinel = t["background_sentinel"].get<double>();
            cfg.sentinel_from_config = true;
        }
        p.symmetric = t.value("symmetric", p.symmetric);
    }
    if (j.contains("flow")) {
        const json& f = j["flow"];
        check_keys(f, {"pyramid_levels", "window_radius", "iterations_per_level", "min_eigen"},
                   origin + ".flow");
        FlowParams& p = cfg.pipeline.flow;
        p.pyramid_levels = f.value("pyramid_levels", p.pyramid_levels);
        p.window_radius = f.value("window_radius", p.window_radius);
        p.iterations_per_level = f.value("iterations_per_level", p.iterations_per_level);
        p.min_eigen = f.value("min_eigen", p.min_eigen);
    }
    if (j.contains("flow_edge")) {
        const json& f = j["flow_edge"];
        check_keys(f,
                   {"interpolation", "dilation_radius", "spline_min_chain", "interior_margin",
                    "source_policy"},
                   origin + ".flow_edge");
        FlowEdgeParams& p = cfg.pipeline.flow_edge;
        if (f.contains("interpolation")) {
            const std::string v = f["interpolation"].get<std::string>();
            if (v == "dilation") {
                p.interpolation = EdgeInterpolation::kDilation;
            } else if (v == "spline") {
                p.interpolation = EdgeInterpolation::kSpline;
            } else {
                throw ConfigError(origin + ".flow_edge: unknown interpolation '" + v + "'");
            }
        }
        p.dilation_radius = f.value("dilation_radius", p.dilation_radius);
        p.spline_min_chain = f.value("spline_min_chain", p.spline_min_chain);
        p.interior_margin = f.value("interior_margin", p.interior_margin);
        if (f.contains("source_policy")) {
            const std::string v = f["source_policy"].get<std::string>();
            if (v == "previous_frame") {
                p.source_policy = SourcePolicy::kPreviousFrame;
            } else if (v == "last_occlusion_free") {
                p.source_policy = SourcePolicy::kLastOcclusionFree;
            } else {
                throw ConfigError(origin + ".flow_edge: unknown source_policy '" + v + "'");
            }
        }
    }
    if (j.contains("loss")) {
        const json& l = j["loss"];
        check_keys(l, {"delta", "negatives_per_anchor", "rng_seed", "patch_px"}, origin + ".loss");
        cfg.loss.delta = l.value("delta", cfg.loss.delta);
        cfg.loss.negatives_per_anchor = l.value("negatives_per_anchor", cfg.loss.negatives_per_anchor);
        cfg.loss.rng_seed = l.value("rng_seed", cfg.loss.rng_seed);
        cfg.patch_px = l.value("patch_px", cfg.patch_px);
    }
    if (j.contains("metrics")) {
        const json& m = j["metrics"];
        check_keys(m, {"tolerance"}, origin + ".metrics");
        cfg.metric_tolerance = m.value("tolerance", cfg.metric_tolerance);
    }
    return cfg;
}

std::string run_config_to_json_text(const RunConfig& cfg) {
    json j;
    j["version"] = "fded-run/1";
    j["seed"] = cfg.seed;
    json t;
    t["w"] = cfg.pipeline.threshold.window;
    if (cfg.pipeline.threshold.sigma) t["sigma"] = *cfg.pipeline.threshold.sigma;
    if (cfg.pipeline.threshold.offset_c) t["offset_c"] = *cfg.pipeline.threshold.offset_c;
    t["background_sentinel"] = cfg.pipeline.threshold.background_sentinel;
    t["symmetric"] = cfg.pipeline.threshold.symmetric;
    j["threshold"] = t;
    j["flow"] = {{"pyramid_levels", cfg.pipeline.flow.pyramid_levels},
                 {"window_radius", cfg.pipeline.flow.window_radius},
                 {"iterations_per_level", cfg.pipeline.flow.iterations_per_level},
                 {"min_eigen", cfg.pipeline.flow.min_eigen}};
    j["flow_edge"] = {
        {"interpolation",
         cfg.pipeline.flow_edge.interpolation == EdgeInterpolation::kDilation ? "dilation"
                                                                              : "spline"},
        {"dilation_radius", cfg.pipeline.flow_edge.dilation_radius},
        {"spline_min_chain", cfg.pipeline.flow_edge.spline_min_chain},
        {"interior_margin", cfg.pipeline.flow_edge.interior_margin},
        {"source_policy",
         cfg.pipeline.flow_edge.source_policy == SourcePolicy::kPreviousFrame
             ? "previous_frame"
             : "last_occlusion_free"}};
    j["loss"] = {{"delta", cfg.loss.delta},
                 {"negatives_per_anchor", cfg.loss.negatives_per_anchor},
                 {"rng_seed", cfg.loss.rng_seed},
                 {"patch_px", cfg.patch_px}};
    j["metrics"] = {{"tolerance", cfg.metric_tolerance}};
    return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json_text(read_file(path), path.string());
}

}  // namespace fded
