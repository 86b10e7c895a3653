#pragma once

#include "fded/raster.hpp"

#include <vector>

namespace fded {

struct EdgeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tolerance = 0;
    long matched_pred = 0;
    long total_pred = 0;
    long matched_oracle = 0;
    long total_oracle = 0;
    bool empty_pred = false;
    bool empty_oracle = false;
};

// Distance-tolerant matching: a predicted pixel counts as matched iff some
// oracle pixel lies within Chebyshev distance tol, and symmetrically for
// recall. Empty pred scores precision 0; empty oracle scores recall 1.
EdgeScore edge_prf(const EdgeMap& pred, const EdgeMap& oracle, int tol);

struct SsimParams {
    int window = 7;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

// Mean local SSIM over uniformly weighted sliding windows (full windows only).
double ssim(const ScalarGrid& a, const ScalarGrid& b, const SsimParams& params = {});

ScalarGrid to_grid(const EdgeMap& e);

// Mean SSIM over consecutive pairs; needs at least two frames.
double temporal_consistency(const std::vector<ScalarGrid>& frames, const SsimParams& params = {});
double temporal_consistency(const std::vector<EdgeMap>& frames, const SsimParams& params = {});

}  // namespace fded
