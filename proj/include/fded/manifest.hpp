#pragma once

#include "fded/edge_fusion.hpp"
#include "fded/scene_synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fded {

inline constexpr const char* kManifestVersion = "fded-seq/1";

// Per-frame file references; optional entries are empty strings.
struct FrameEntry {
    int index = 0;
    std::string rgb;
    std::string depth;
    std::string clean;
    std::string oracle_edges;
    std::string occluded_boundary;
    std::string flow_oracle;    // analytic generator flow index -> index+1
    std::string flow_external;  // plug-in flow replacing the built-in estimate
    bool occlusion_free = false;
    double occlusion_rate = 0.0;
};

struct SequenceManifest {
    std::string version = kManifestVersion;
    int width = 0;
    int height = 0;
    double background_sentinel = 0.0;
    std::string generator_echo;  // serialized scene spec, empty if not generated
    std::vector<FrameEntry> frames;
};

// Scene spec JSON (strict keys); the synth CLI consumes these files.
SceneSpec scene_from_json_text(const std::string& text, const std::string& origin);
std::string scene_to_json_text(const SceneSpec& spec);
SceneSpec load_scene_spec(const std::filesystem::path& path);

// Writes rasters, flow files and the manifest (manifest last, as the commit
// point) for a rendered sequence.
SequenceManifest save_sequence(const std::filesystem::path& dir, const SceneSpec& spec,
                               const std::vector<FrameTruth>& truths);

// Loads and validates a manifest: version, contiguous indices, referenced
// files present.
SequenceManifest load_manifest(const std::filesystem::path& dir);

// Frame records (rgb, depth, flags, optional external flow) for the pipeline.
std::vector<FrameRecord> load_frame_records(const std::filesystem::path& dir,
                                            const SequenceManifest& manifest);

}  // namespace fded
