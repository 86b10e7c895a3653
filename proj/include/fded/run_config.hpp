#pragma once

#include "fded/edge_fusion.hpp"
#include "fded/losses.hpp"

#include <filesystem>
#include <string>

namespace fded {

// Single-document run configuration: pipeline parameters, loss parameters,
// metric tolerance and the run seed. Unknown keys are rejected by name.
struct RunConfig {
    std::uint64_t seed = 0;
    PipelineConfig pipeline;
    LossParams loss;
    int patch_px = 8;
    int metric_tolerance = 2;
    bool sentinel_from_config = false;  // config pinned threshold.background_sentinel
};

RunConfig run_config_from_json_text(const std::string& text, const std::string& origin);
std::string run_config_to_json_text(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fded
