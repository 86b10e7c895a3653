#include "fded/edge_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fded {

ScalarGrid luminance(const std::array<ScalarGrid, 3>& rgb) {
    ScalarGrid out(rgb[0].width, rgb[0].height);
    for (size_t i = 0; i < out.values.size(); ++i) {
        const double v = 0.299 * rgb[0].values[i] + 0.587 * rgb[1].values[i] +
                         0.114 * rgb[2].values[i];
        out.values[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

int select_reference(const std::vector<FrameRecord>& frames, int i, SourcePolicy policy) {
    if (i <= 0) return 0;
    if (policy == SourcePolicy::kPreviousFrame) return i - 1;
    for (int j = i - 1; j >= 0; --j) {
        if (frames[j].occlusion_free) return j;
    }
    throw ConfigError("select_reference: no occlusion-free frame before frame " +
                      std::to_string(i));
}

std::vector<EdgeBundle> run_pipeline(const std::vector<FrameRecord>& frames,
                                     const PipelineConfig& cfg) {
    if (frames.empty()) throw ParamError("run_pipeline: empty frame sequence");
    const int w = frames[0].depth.width, h = frames[0].depth.height;
    for (const FrameRecord& fr : frames) {
        require_same_shape(w, h, fr.depth.width, fr.depth.height,
                           "run_pipeline frame " + std::to_string(fr.index));
        for (const ScalarGrid& ch : fr.rgb) {
            require_same_shape(w, h, ch.width, ch.height,
                               "run_pipeline frame " + std::to_string(fr.index));
        }
    }

    const int n = static_cast<int>(frames.size());
    std::vector<ScalarGrid> luma(n);
    for (int i = 0; i < n; ++i) luma[i] = luminance(frames[i].rgb);

    // Pairwise flow k -> k+1, computed once; chains reuse the cache.
    std::vector<FlowField> pairwise(std::max(0, n - 1));
    std::vector<bool> have_pair(std::max(0, n - 1), false);
    auto pair_flow = [&](int k) -> const FlowField& {
        if (!have_pair[k]) {
            if (frames[k].external_flow) {
                const FlowField& ext = *frames[k].external_flow;
                require_same_shape(w, h, ext.width, ext.height,
                                   "external flow for frame " + std::to_string(frames[k].index));
                pairwise[k] = ext;
            } else {
                pairwise[k] = estimate_flow(luma[k], luma[k + 1], cfg.flow);
            }
            have_pair[k] = true;
        }
        return pairwise[k];
    };

    std::vector<EdgeBundle> bundles;
    bundles.reserve(frames.size());
    std::vector<EdgeMap> depth_edges(n);
    for (int i = 0; i < n; ++i) {
        depth_edges[i] = depth_edge_detect(frames[i].depth, cfg.threshold);
    }

    for (int i = 0; i < n; ++i) {
        EdgeBundle bundle;
        bundle.d = depth_edges[i];
        const int j = select_reference(frames, i, cfg.flow_edge.source_policy);
        bundle.source_frame = j;
        bundle.chain_length = i - j;
        if (j == i) {
            bundle.f = EdgeMap(w, h);
            bundle.e = bundle.d;
            bundles.push_back(std::move(bundle));
            continue;
        }
        FlowField chain = pair_flow(j);
        for (int k = j + 1; k < i; ++k) {
            chain = compose_flows(chain, pair_flow(k));
        }
        const BinaryMask fg = foreground_mask(frames[i].depth, cfg.threshold.background_sentinel);
        FlowEdgeResult fe = flow_edge_detect(depth_edges[j], chain, depth_edges[i], fg,
                                             cfg.flow_edge);
        bundle.dropped_points = fe.dropped_points;
        bundle.f = std::move(fe.edges);
        bundle.e = mask_union(bundle.d, bundle.f);
        bundles.push_back(std::move(bundle));
    }
    return bundles;
}

}  // namespace fded
