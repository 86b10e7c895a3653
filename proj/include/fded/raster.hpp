#pragma once

#include "fded/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fded {

// Coordinate convention used everywhere: x = column, y = row, origin top-left,
// pixel centers at integer coordinates. Row-major storage, index = y*width + x.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

// H x W real-valued raster (depth maps, threshold maps, luminance).
struct ScalarGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarGrid() = default;
    ScalarGrid(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// H x W binary raster, 1 = edge.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    bool test(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t count() const;
    bool empty() const { return count() == 0; }
};

// Same shape as EdgeMap but the bits mean region membership, not edges.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    bool test(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t count() const;
};

// H x W grid of (dx, dy) vectors, units pixels/frame.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<Vec2> vectors;

    FlowField() = default;
    FlowField(int w, int h) : width(w), height(h), vectors(static_cast<size_t>(w) * h) {}

    Vec2& at(int x, int y) { return vectors[static_cast<size_t>(y) * width + x]; }
    Vec2 at(int x, int y) const { return vectors[static_cast<size_t>(y) * width + x]; }
};

// Ordered list of subpixel points. chain_ids, when non-empty, labels each
// point with the 8-connected chain it came from; propagation preserves both
// order and labels.
struct PointSet {
    std::vector<Vec2> points;
    std::vector<int> chain_ids;  // empty or same length as points

    size_t size() const { return points.size(); }
    bool has_chains() const { return !chain_ids.empty(); }
};

// Rounding rule shared by every rasterizing operation: round half away from zero.
int round_px(double v);

void require_same_shape(int wa, int ha, int wb, int hb, const std::string& what);

// Bit set iff set in a or b.
EdgeMap mask_union(const EdgeMap& a, const EdgeMap& b);

struct RasterizedPoints {
    EdgeMap map;
    int dropped = 0;  // out-of-bounds points, diagnostics only
};

// Bit set at the rounded pixel of each in-bounds point.
RasterizedPoints rasterize_points(const PointSet& pts, int w, int h);

// Bit set iff depth < sentinel. The sentinel must exceed every foreground depth.
BinaryMask foreground_mask(const ScalarGrid& depth, double background_sentinel);

// Bit set iff every pixel within Chebyshev distance radius is set in m.
// Pixels outside the frame count as unset, so the mask shrinks at borders.
BinaryMask erode_mask(const BinaryMask& m, int radius);

// Chebyshev (square) dilation; radius 0 is the identity.
EdgeMap dilate_edges(const EdgeMap& m, int radius);
BinaryMask dilate_mask(const BinaryMask& m, int radius);

}  // namespace fded
