#include "fded/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fded {

size_t EdgeMap::count() const {
    return static_cast<size_t>(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

size_t BinaryMask::count() const {
    return static_cast<size_t>(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

int round_px(double v) {
    return static_cast<int>(std::lround(v));
}

void require_same_shape(int wa, int ha, int wb, int hb, const std::string& what) {
    if (wa != wb || ha != hb) {
        throw ShapeError(what + ": dimension mismatch " + std::to_string(wa) + "x" +
                         std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                         std::to_string(hb));
    }
}

EdgeMap mask_union(const EdgeMap& a, const EdgeMap& b) {
    require_same_shape(a.width, a.height, b.width, b.height, "mask_union");
    EdgeMap out(a.width, a.height);
    for (size_t i = 0; i < out.bits.size(); ++i) {
        out.bits[i] = (a.bits[i] | b.bits[i]) ? 1 : 0;
    }
    return out;
}

RasterizedPoints rasterize_points(const PointSet& pts, int w, int h) {
    RasterizedPoints out;
    out.map = EdgeMap(w, h);
    for (const Vec2& p : pts.points) {
        const int x = round_px(p.x);
        const int y = round_px(p.y);
        if (x >= 0 && x < w && y >= 0 && y < h) {
            out.map.set(x, y);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

BinaryMask foreground_mask(const ScalarGrid& depth, double background_sentinel) {
    BinaryMask m(depth.width, depth.height);
    for (size_t i = 0; i < depth.values.size(); ++i) {
        m.bits[i] = depth.values[i] < background_sentinel ? 1 : 0;
    }
    return m;
}

namespace {

// Chebyshev morphology shared by erosion and dilation. Separable into a
// horizontal and a vertical min/max pass because the structuring element is
// a square.
template <typename Raster>
Raster chebyshev_morph(const Raster& m, int radius, bool erode) {
    if (radius <= 0) return m;
    const int w = m.width, h = m.height;
    Raster tmp(w, h), out(w, h);
    // horizontal pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = erode ? 1 : 0;
            for (int i = -radius; i <= radius; ++i) {
                const int xi = x + i;
                const std::uint8_t v =
                    (xi >= 0 && xi < w) ? m.bits[static_cast<size_t>(y) * w + xi] : 0;
                if (erode) {
                    acc = static_cast<std::uint8_t>(acc & (v ? 1 : 0));
                } else {
                    acc = static_cast<std::uint8_t>(acc | (v ? 1 : 0));
                }
            }
            tmp.bits[static_cast<size_t>(y) * w + x] = acc;
        }
    }
    // vertical pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = erode ? 1 : 0;
            for (int j = -radius; j <= radius; ++j) {
                const int yj = y + j;
                const std::uint8_t v =
                    (yj >= 0 && yj < h) ? tmp.bits[static_cast<size_t>(yj) * w + x] : 0;
                if (erode) {
                    acc = static_cast<std::uint8_t>(acc & (v ? 1 : 0));
                } else {
                    acc = static_cast<std::uint8_t>(acc | (v ? 1 : 0));
                }
            }
            out.bits[static_cast<size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

BinaryMask erode_mask(const BinaryMask& m, int radius) {
    if (radius < 0) throw ParamError("erode_mask: radius must be >= 0");
    return chebyshev_morph(m, radius, /*erode=*/true);
}

EdgeMap dilate_edges(const EdgeMap& m, int radius) {
    if (radius < 0) throw ParamError("dilate_edges: radius must be >= 0");
    return chebyshev_morph(m, radius, /*erode=*/false);
}

BinaryMask dilate_mask(const BinaryMask& m, int radius) {
    if (radius < 0) throw ParamError("dilate_mask: radius must be >= 0");
    return chebyshev_morph(m, radius, /*erode=*/false);
}

}  // namespace fded
