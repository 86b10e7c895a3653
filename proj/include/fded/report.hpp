#pragma once

#include "fded/metrics.hpp"
#include "fded/run_config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fded {

struct FrameScore {
    int frame = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double ssim_prev = 1.0;  // SSIM against the previous predicted frame; 1 for frame 0
    double occlusion_rate = 0.0;
    std::optional<double> occb_recall;  // recall on the occluded-boundary subset
};

struct OcclusionBucket {
    double lo = 0.0;  // rate interval (lo, hi]; the first bucket is [0, 0]
    double hi = 0.0;
    int frames = 0;
    double mean_f1 = 0.0;
    double mean_recall = 0.0;
};

struct SequenceEvaluation {
    std::vector<FrameScore> per_frame;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    double temporal_consistency = 1.0;
    std::vector<OcclusionBucket> buckets;
};

// Scores predicted edge maps against oracle maps frame by frame, with the
// occluded-boundary recall where that oracle subset exists.
SequenceEvaluation evaluate_sequence(const std::vector<EdgeMap>& pred,
                                     const std::vector<EdgeMap>& oracle,
                                     const std::vector<EdgeMap>* occluded_boundary,
                                     const std::vector<double>& occlusion_rates, int tol);

std::string report_to_json_text(const SequenceEvaluation& eval, const RunConfig& config_echo);

}  // namespace fded
