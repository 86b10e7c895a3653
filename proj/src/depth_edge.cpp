#include "fded/depth_edge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fded {

namespace {

void validate(const AdaptiveThresholdParams& p) {
    if (p.window < 3 || p.window % 2 == 0) {
        throw ParamError("adaptive threshold: window must be odd and >= 3, got " +
                         std::to_string(p.window));
    }
    if (p.resolved_sigma() <= 0.0) {
        throw ParamError("adaptive threshold: sigma must be > 0");
    }
    if (p.offset_c && *p.offset_c < 0.0) {
        throw ParamError("adaptive threshold: offset_c must be >= 0");
    }
}

std::vector<double> gaussian_profile(int window, double sigma) {
    const int half = window / 2;
    std::vector<double> g(window);
    for (int i = -half; i <= half; ++i) {
        g[i + half] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    }
    return g;
}

// Comparison guard: the weighted mean of an exactly uniform window can differ
// from the common value by accumulated rounding, which must not fire an edge.
double rounding_guard(double d, double t) {
    return 1e-12 * std::max({1.0, std::abs(d), std::abs(t)});
}

struct ForegroundStats {
    bool any = false;
    double min = 0.0;
    double max = 0.0;
    double range() const { return max - min; }
};

ForegroundStats foreground_stats(const ScalarGrid& depth, double sentinel) {
    ForegroundStats s;
    for (double v : depth.values) {
        if (v < sentinel) {
            if (!s.any) {
                s.min = s.max = v;
                s.any = true;
            } else {
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
            }
        }
    }
    return s;
}

}  // namespace

GaussianWindow gaussian_window(int window, double sigma) {
    if (window < 3 || window % 2 == 0) {
        throw ParamError("gaussian_window: window must be odd and >= 3, got " +
                         std::to_string(window));
    }
    if (sigma <= 0.0) {
        throw ParamError("gaussian_window: sigma must be > 0");
    }
    const std::vector<double> g = gaussian_profile(window, sigma);
    GaussianWindow win;
    win.window = window;
    win.weights.resize(static_cast<size_t>(window) * window);
    double sum = 0.0;
    for (int j = 0; j < window; ++j) {
        for (int i = 0; i < window; ++i) {
            const double w = g[i] * g[j];
            win.weights[static_cast<size_t>(j) * window + i] = w;
            sum += w;
        }
    }
    for (double& w : win.weights) w /= sum;
    return win;
}

ScalarGrid adaptive_threshold_map(const ScalarGrid& depth, const AdaptiveThresholdParams& params) {
    validate(params);
    const int w = depth.width, h = depth.height;
    const int win = params.window;
    const int half = win / 2;
    const std::vector<double> g = gaussian_profile(win, params.resolved_sigma());

    // The 2D Gaussian factorizes and the in-bounds window is a rectangle, so
    // both the weighted sum and the in-bounds weight mass are separable.
    ScalarGrid row_sum(w, h), row_norm(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0, n = 0.0;
            const int i0 = std::max(-half, -x);
            const int i1 = std::min(half, w - 1 - x);
            for (int i = i0; i <= i1; ++i) {
                s += g[i + half] * depth.at(x + i, y);
                n += g[i + half];
            }
            row_sum.at(x, y) = s;
            row_norm.at(x, y) = n;
        }
    }
    ScalarGrid out(w, h);
    for (int y = 0; y < h; ++y) {
        const int j0 = std::max(-half, -y);
        const int j1 = std::min(half, h - 1 - y);
        for (int x = 0; x < w; ++x) {
            double s = 0.0, n = 0.0;
            for (int j = j0; j <= j1; ++j) {
                s += g[j + half] * row_sum.at(x, y + j);
                n += g[j + half] * row_norm.at(x, y + j);
            }
            out.at(x, y) = s / n;
        }
    }
    return out;
}

EdgeMap depth_edge_detect(const ScalarGrid& depth, const AdaptiveThresholdParams& params) {
    validate(params);
    const int w = depth.width, h = depth.height;
    const BinaryMask fg = foreground_mask(depth, params.background_sentinel);
    const ForegroundStats stats = foreground_stats(depth, params.background_sentinel);

    EdgeMap d(w, h);
    if (!stats.any) return d;

    // Background pixels get a canonical sentinel derived from the foreground
    // depth range before the threshold map is computed, which keeps detection
    // invariant under affine re-scaling of the depth values.
    const double range = stats.range();
    const double canonical = stats.max + (range > 0.0 ? 10.0 * range : 1.0);
    ScalarGrid substituted = depth;
    bool any_background = false;
    for (size_t i = 0; i < substituted.values.size(); ++i) {
        if (!fg.bits[i]) {
            substituted.values[i] = canonical;
            any_background = true;
        }
    }

    const ScalarGrid threshold = adaptive_threshold_map(substituted, params);
    const double c = params.offset_c ? *params.offset_c : 1e-3 * range;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!fg.test(x, y)) continue;
            const double dv = substituted.at(x, y);
            const double tv = threshold.at(x, y);
            const double diff = params.symmetric ? std::abs(dv - tv) : dv - tv;
            if (diff > c + rounding_guard(dv, tv)) d.set(x, y);
        }
    }

    // Foreground rim along the silhouette: a foreground pixel with an in-bounds
    // background 8-neighbor. The one-sided test fires on the deeper side of a
    // step, which at the silhouette is the (masked) background, so the rim is
    // what puts the silhouette edge on the object side.
    if (any_background) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!fg.test(x, y)) continue;
                bool rim = false;
                for (int j = -1; j <= 1 && !rim; ++j) {
                    for (int i = -1; i <= 1; ++i) {
                        const int xi = x + i, yj = y + j;
                        if (fg.in_bounds(xi, yj) && !fg.test(xi, yj)) {
                            rim = true;
                            break;
                        }
                    }
                }
                if (rim) d.set(x, y);
            }
        }
    }
    return d;
}

}  // namespace fded
