#pragma once

#include "fded/raster.hpp"

#include <optional>

namespace fded {

// Parameters of the adaptive-threshold edge test. sigma and offset_c left
// unset resolve to w/4 and 1e-3 * (foreground depth range) at detection time.
struct AdaptiveThresholdParams {
    int window = 9;                   // square window width, odd, >= 3
    std::optional<double> sigma;      // Gaussian std in pixels
    std::optional<double> offset_c;   // added to T before comparison, >= 0
    double background_sentinel = 1e30;  // depth >= sentinel marks background
    bool symmetric = false;           // |D - T| > c instead of D > T + c

    double resolved_sigma() const { return sigma ? *sigma : window / 4.0; }
};

// w x w non-negative weights summing to 1, symmetric, center maximal.
struct GaussianWindow {
    int window = 0;
    std::vector<double> weights;  // row-major, (i, j) offsets in [-w/2, w/2]

    double at(int i, int j) const {
        const int half = window / 2;
        return weights[static_cast<size_t>(j + half) * window + (i + half)];
    }
};

GaussianWindow gaussian_window(int window, double sigma);

// Gaussian-weighted local mean of depth; windows clipped at borders are
// renormalized over the in-bounds weights.
ScalarGrid adaptive_threshold_map(const ScalarGrid& depth, const AdaptiveThresholdParams& params);

// Depth-based edge map d: foreground pixels deeper than their local weighted
// mean by more than offset_c, plus the foreground rim along the background
// silhouette. Background pixels are always 0 in the output.
EdgeMap depth_edge_detect(const ScalarGrid& depth, const AdaptiveThresholdParams& params);

}  // namespace fded
