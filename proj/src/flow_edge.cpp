#include "fded/flow_edge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fded {

namespace {

struct Pixel {
    int x, y;
};

// Natural cubic spline through (t_k, v_k); returns the interpolant evaluator
// state (second derivatives) for one coordinate.
std::vector<double> spline_second_derivatives(const std::vector<double>& t,
                                              const std::vector<double>& v) {
    const size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double h0 = t[i] - t[i - 1];
        const double h1 = t[i + 1] - t[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        r[i] = (v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0;
    }
    // Thomas algorithm
    for (size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    m[n - 1] = r[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) {
        m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
    }
    return m;
}

double spline_eval(const std::vector<double>& t, const std::vector<double>& v,
                   const std::vector<double>& m, size_t seg, double tt) {
    const double h = t[seg + 1] - t[seg];
    const double a = (t[seg + 1] - tt) / h;
    const double b = (tt - t[seg]) / h;
    return a * v[seg] + b * v[seg + 1] +
           ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * (h * h) / 6.0;
}

}  // namespace

PointSet edge_points(const EdgeMap& d) {
    const int w = d.width, h = d.height;
    PointSet out;
    std::vector<int> label(static_cast<size_t>(w) * h, -1);
    int next_chain = 0;

    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!d.test(x0, y0) || label[static_cast<size_t>(y0) * w + x0] >= 0) continue;
            // Collect the 8-connected component, scan order. The first pixel
            // found is the topmost-leftmost one.
            std::vector<Pixel> component;
            std::vector<Pixel> stack{{x0, y0}};
            label[static_cast<size_t>(y0) * w + x0] = next_chain;
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                component.push_back(p);
                for (int j = -1; j <= 1; ++j) {
                    for (int i = -1; i <= 1; ++i) {
                        const int nx = p.x + i, ny = p.y + j;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        size_t idx = static_cast<size_t>(ny) * w + nx;
                        if (d.bits[idx] && label[idx] < 0) {
                            label[idx] = next_chain;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            // Nearest-neighbor traversal from the topmost-leftmost pixel gives
            // a deterministic order the spline interpolator can follow.
            std::sort(component.begin(), component.end(), [](Pixel a, Pixel b) {
                return a.y != b.y ? a.y < b.y : a.x < b.x;
            });
            std::vector<bool> used(component.size(), false);
            size_t current = 0;
            used[0] = true;
            out.points.push_back({static_cast<double>(component[0].x),
                                  static_cast<double>(component[0].y)});
            out.chain_ids.push_back(next_chain);
            for (size_t step = 1; step < component.size(); ++step) {
                double best = std::numeric_limits<double>::max();
                size_t best_idx = 0;
                for (size_t k = 0; k < component.size(); ++k) {
                    if (used[k]) continue;
                    const double dx = component[k].x - component[current].x;
                    const double dy = component[k].y - component[current].y;
                    const double dist = dx * dx + dy * dy;
                    if (dist < best) {
                        best = dist;
                        best_idx = k;
                    }
                }
                used[best_idx] = true;
                current = best_idx;
                out.points.push_back({static_cast<double>(component[best_idx].x),
                                      static_cast<double>(component[best_idx].y)});
                out.chain_ids.push_back(next_chain);
            }
            ++next_chain;
        }
    }
    return out;
}

PointSet propagate_points(const PointSet& p, const FlowField& v) {
    PointSet out;
    out.points.reserve(p.points.size());
    out.chain_ids = p.chain_ids;
    for (const Vec2& pt : p.points) {
        out.points.push_back(pt + sample_flow(v, pt));
    }
    return out;
}

PointSet interior_filter(const PointSet& p_star, const EdgeMap& d_i, const BinaryMask& fg,
                         int margin) {
    require_same_shape(d_i.width, d_i.height, fg.width, fg.height, "interior_filter");
    if (margin < 0) throw ParamError("interior_filter: margin must be >= 0");
    const BinaryMask interior = erode_mask(fg, margin);
    PointSet out;
    const bool chains = p_star.has_chains();
    for (size_t k = 0; k < p_star.points.size(); ++k) {
        const Vec2 pt = p_star.points[k];
        const int x = round_px(pt.x), y = round_px(pt.y);
        if (interior.in_bounds(x, y) && interior.test(x, y)) {
            out.points.push_back(pt);
            if (chains) out.chain_ids.push_back(p_star.chain_ids[k]);
        }
    }
    return out;
}

EdgeMap interpolate_dilation(const PointSet& p, int radius, int w, int h) {
    return dilate_edges(rasterize_points(p, w, h).map, radius);
}

EdgeMap interpolate_spline(const PointSet& p, int w, int h, int min_chain) {
    EdgeMap out(w, h);
    auto stamp = [&](double x, double y) {
        const int xi = round_px(x), yi = round_px(y);
        if (xi >= 0 && xi < w && yi >= 0 && yi < h) out.set(xi, yi);
    };

    // Split into chains, preserving order within each.
    std::vector<std::vector<Vec2>> chains;
    if (p.has_chains()) {
        int prev_id = std::numeric_limits<int>::min();
        for (size_t k = 0; k < p.points.size(); ++k) {
            if (p.chain_ids[k] != prev_id) {
                chains.emplace_back();
                prev_id = p.chain_ids[k];
            }
            chains.back().push_back(p.points[k]);
        }
    } else if (!p.points.empty()) {
        chains.push_back(p.points);
    }

    for (const auto& chain : chains) {
        if (static_cast<int>(chain.size()) < min_chain) {
            for (const Vec2& pt : chain) stamp(pt.x, pt.y);
            continue;
        }
        // Chord-length parametrization; coincident consecutive points collapse.
        std::vector<double> t{0.0}, xs{chain[0].x}, ys{chain[0].y};
        for (size_t k = 1; k < chain.size(); ++k) {
            const double dx = chain[k].x - xs.back();
            const double dy = chain[k].y - ys.back();
            const double len = std::hypot(dx, dy);
            if (len <= 1e-12) continue;
            t.push_back(t.back() + len);
            xs.push_back(chain[k].x);
            ys.push_back(chain[k].y);
        }
        if (static_cast<int>(t.size()) < min_chain) {
            for (size_t k = 0; k < t.size(); ++k) stamp(xs[k], ys[k]);
            continue;
        }
        const std::vector<double> mx = spline_second_derivatives(t, xs);
        const std::vector<double> my = spline_second_derivatives(t, ys);
        for (size_t seg = 0; seg + 1 < t.size(); ++seg) {
            const double seg_len = t[seg + 1] - t[seg];
            const int steps = std::max(1, static_cast<int>(std::ceil(seg_len / 0.4)));
            for (int s = 0; s <= steps; ++s) {
                const double tt = t[seg] + seg_len * s / steps;
                stamp(spline_eval(t, xs, mx, seg, tt), spline_eval(t, ys, my, seg, tt));
            }
        }
    }
    return out;
}

FlowEdgeResult flow_edge_detect(const EdgeMap& source_edges, const FlowField& v_chain,
                                const EdgeMap& d_i, const BinaryMask& fg_i,
                                const FlowEdgeParams& params) {
    require_same_shape(source_edges.width, source_edges.height, d_i.width, d_i.height,
                       "flow_edge_detect");
    require_same_shape(source_edges.width, source_edges.height, v_chain.width, v_chain.height,
                       "flow_edge_detect");

    FlowEdgeResult result;
    const PointSet source = edge_points(source_edges);
    result.source_points = static_cast<int>(source.size());

    const PointSet shifted = propagate_points(source, v_chain);
    const PointSet interior =
        interior_filter(shifted, d_i, fg_i, params.interior_margin);
    result.dropped_points = static_cast<int>(shifted.size() - interior.size());

    if (interior.points.empty()) {
        result.edges = EdgeMap(d_i.width, d_i.height);
        return result;
    }
    if (params.interpolation == EdgeInterpolation::kDilation) {
        const RasterizedPoints raster = rasterize_points(interior, d_i.width, d_i.height);
        result.dropped_points += raster.dropped;
        result.edges = dilate_edges(raster.map, params.dilation_radius);
    } else {
        result.edges = interpolate_spline(interior, d_i.width, d_i.height,
                                          params.spline_min_chain);
    }
    // Interpolation may bleed past the silhouette; flow edges stay inside it.
    for (size_t i = 0; i < result.edges.bits.size(); ++i) {
        result.edges.bits[i] = static_cast<std::uint8_t>(result.edges.bits[i] & fg_i.bits[i]);
    }
    return result;
}

}  // namespace fded
