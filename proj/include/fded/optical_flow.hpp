#pragma once

#include "fded/raster.hpp"

namespace fded {

struct FlowParams {
    int pyramid_levels = 3;       // >= 1
    int window_radius = 7;        // least-squares window half-width, pixels
    int iterations_per_level = 3;
    double min_eigen = 1e-4;      // gate on the mean structure-tensor eigenvalue
};

// Dense forward flow prev -> curr from pyramidal per-pixel least squares.
// Pixels whose structure tensor fails the eigenvalue gate keep the
// coarser-level estimate unrefined.
FlowField estimate_flow(const ScalarGrid& prev, const ScalarGrid& curr, const FlowParams& params);

// Chains a -> b and b -> c: v_ac(p) = v_ab(p) + v_bc(p + v_ab(p)), the second
// term sampled bilinearly with border clamping.
FlowField compose_flows(const FlowField& v_ab, const FlowField& v_bc);

// Bilinear flow lookup at a subpixel position; out-of-bounds clamps to border.
Vec2 sample_flow(const FlowField& v, Vec2 p);

// Bilinear scalar lookup with border clamping. Shared with warping and tests.
double sample_bilinear(const ScalarGrid& g, double x, double y);

}  // namespace fded
