#pragma once

#include "fded/raster.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fded {

// Part-local texture. Stripes are a smooth sinusoid along a fixed direction;
// noise is bilinearly interpolated seeded value noise on a square lattice.
struct TextureSpec {
    enum class Type { kStripes, kNoise };
    Type type = Type::kNoise;
    double period = 8.0;  // stripe wavelength or noise cell size, pixels
    double phase = 0.0;   // stripes only, radians
    double angle = 0.0;   // stripe direction in part-local coords, radians
    std::array<double, 3> color_lo{0.55, 0.62, 0.72};
    std::array<double, 3> color_hi{0.82, 0.87, 0.92};
    std::uint64_t noise_seed = 0;
};

struct CapsuleShape {
    Vec2 p0, p1;    // segment endpoints, part-local coordinates
    double radius = 1.0;
};

struct PolygonShape {
    std::vector<Vec2> vertices;  // part-local coordinates
};

// A rigid scene element. Local geometry is expressed relative to the pivot;
// the per-frame joint angle rotates it about the pivot in world space.
struct Part {
    std::string name;
    std::variant<CapsuleShape, PolygonShape> shape;
    Vec2 pivot;
    std::optional<double> depth;  // explicit scene-units depth
    int depth_rank = 0;           // else base_depth - rank * depth_gap
    TextureSpec texture;
    double stroke_width = 2.0;
    std::array<double, 3> ink{0.06, 0.06, 0.06};  // contour stroke color
    std::vector<double> angles;  // radians per frame; empty = static
};

struct SceneSpec {
    int width = 256;
    int height = 256;
    int frames = 1;
    std::uint64_t seed = 0;
    double base_depth = 5.0;
    double depth_gap = 0.5;  // depth separation between consecutive ranks
    std::vector<Part> parts;

    double part_depth(size_t i) const {
        const Part& p = parts[i];
        return p.depth ? *p.depth : base_depth - p.depth_rank * depth_gap;
    }
};

// Exact ground truth for one rendered frame.
struct FrameTruth {
    std::array<ScalarGrid, 3> rgb;    // degraded projection Z: blurred, thick strokes
    std::array<ScalarGrid, 3> clean;  // drawing-look frame X: sharp strokes
    ScalarGrid depth;                 // per-part depth plus background sentinel
    EdgeMap oracle_edges;             // all visible part boundaries
    EdgeMap occluded_boundary;        // edge pixels where a nearer part covers a farther one
    FlowField flow_to_next;           // analytic rigid motion of the visible part
    bool occlusion_free = false;
    double occlusion_rate = 0.0;
    std::vector<int> labels;          // visible part per pixel, -1 = background
};

double scene_background_sentinel(const SceneSpec& spec);

std::vector<FrameTruth> render_sequence(const SceneSpec& spec);

// 1 - visible area at frame i / visible area at the rest pose, clamped at 0.
double occlusion_rate(const SceneSpec& spec, int frame);

// Canonical limb-over-body scene: a static capsule body and a textured limb
// sweeping across it, occlusion-free for the first few frames. Nonzero seeds
// jitter geometry, speed and textures for robustness sweeps.
SceneSpec make_canonical_scene(std::uint64_t seed, int frames = 20, int size = 256,
                               double depth_gap = 0.01);

// Small static scene for the toy stylization task (clean X vs degraded Z).
SceneSpec make_toy_drawing_scene(std::uint64_t seed, int size = 64);

}  // namespace fded
