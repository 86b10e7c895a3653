#pragma once

#include "fded/optical_flow.hpp"
#include "fded/raster.hpp"

namespace fded {

enum class EdgeInterpolation { kDilation, kSpline };
enum class SourcePolicy { kPreviousFrame, kLastOcclusionFree };

struct FlowEdgeParams {
    EdgeInterpolation interpolation = EdgeInterpolation::kDilation;
    int dilation_radius = 1;
    int spline_min_chain = 4;   // shorter chains fall back to rasterized points
    int interior_margin = 1;    // erosion radius defining "interior"
    SourcePolicy source_policy = SourcePolicy::kLastOcclusionFree;
};

// One point per set pixel, grouped into chains by 8-connected component and
// ordered by nearest-neighbor traversal from each component's topmost-leftmost
// pixel.
PointSet edge_points(const EdgeMap& d);

// Moves every point by the flow sampled at it; order and chain labels kept.
PointSet propagate_points(const PointSet& p, const FlowField& v);

// Keeps the points whose rounded position lies inside the foreground mask
// eroded by margin; order and chain labels kept among survivors.
PointSet interior_filter(const PointSet& p_star, const EdgeMap& d_i, const BinaryMask& fg,
                         int margin);

// Rasterize then Chebyshev-dilate.
EdgeMap interpolate_dilation(const PointSet& p, int radius, int w, int h);

// Per chain with >= min_chain points, a cubic spline through the ordered
// points rasterized at sub-pixel steps; shorter chains are rasterized as-is.
EdgeMap interpolate_spline(const PointSet& p, int w, int h, int min_chain);

struct FlowEdgeResult {
    EdgeMap edges;
    int source_points = 0;
    int dropped_points = 0;  // interior-filter rejections + out-of-bounds rasterizations
};

// Full flow-based detection: select source edge points, shift them along the
// flow chain, keep interior landings, interpolate into an edge map.
FlowEdgeResult flow_edge_detect(const EdgeMap& source_edges, const FlowField& v_chain,
                                const EdgeMap& d_i, const BinaryMask& fg_i,
                                const FlowEdgeParams& params);

}  // namespace fded
