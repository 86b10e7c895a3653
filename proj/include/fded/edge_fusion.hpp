#pragma once

#include "fded/depth_edge.hpp"
#include "fded/flow_edge.hpp"
#include "fded/optical_flow.hpp"
#include "fded/raster.hpp"

#include <array>
#include <optional>
#include <vector>

namespace fded {

// One animation frame: the 2D projection as RGB in [0,1], its depth raster and
// the occlusion-free flag carried in from the sequence metadata.
struct FrameRecord {
    int index = 0;
    std::array<ScalarGrid, 3> rgb;
    ScalarGrid depth;
    bool occlusion_free = false;
    // When set, replaces the built-in estimate for the pair (index, index+1).
    std::optional<FlowField> external_flow;
};

struct PipelineConfig {
    AdaptiveThresholdParams threshold;
    FlowParams flow;
    FlowEdgeParams flow_edge;
    bool emit_diagnostics = true;
};

// Per-frame result. e is always the exact union of d and f.
struct EdgeBundle {
    EdgeMap d;
    EdgeMap f;
    EdgeMap e;
    int source_frame = 0;
    int chain_length = 0;
    int dropped_points = 0;
};

// Rec.601 luma of an RGB frame, clamped to [0,1].
ScalarGrid luminance(const std::array<ScalarGrid, 3>& rgb);

// Greatest eligible source index for frame i under the policy; i = 0 maps to 0.
int select_reference(const std::vector<FrameRecord>& frames, int i, SourcePolicy policy);

// Runs depth detection, flow chaining and flow-edge recovery over a sequence.
std::vector<EdgeBundle> run_pipeline(const std::vector<FrameRecord>& frames,
                                     const PipelineConfig& cfg);

}  // namespace fded
