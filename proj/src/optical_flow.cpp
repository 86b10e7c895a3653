#include "fded/optical_flow.hpp"

#include <algorithm>
#include <cmath>

namespace fded {

namespace {

void validate(const FlowParams& p) {
    if (p.pyramid_levels < 1) throw ParamError("flow: pyramid_levels must be >= 1");
    if (p.window_radius < 1) throw ParamError("flow: window_radius must be >= 1");
    if (p.iterations_per_level < 1) throw ParamError("flow: iterations_per_level must be >= 1");
    if (p.min_eigen < 0.0) throw ParamError("flow: min_eigen must be >= 0");
}

double clampd(double v, double lo, double hi) { return std::max(lo, std::min(hi, v)); }

// 5-tap binomial blur then decimation by 2.
ScalarGrid downsample(const ScalarGrid& src) {
    static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int w = src.width, h = src.height;
    ScalarGrid tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -2; i <= 2; ++i) {
                s += k[i + 2] * src.at(std::clamp(x + i, 0, w - 1), y);
            }
            tmp.at(x, y) = s;
        }
    }
    const int dw = std::max(1, w / 2), dh = std::max(1, h / 2);
    ScalarGrid dst(dw, dh);
    for (int y = 0; y < dh; ++y) {
        for (int x = 0; x < dw; ++x) {
            double s = 0.0;
            for (int j = -2; j <= 2; ++j) {
                s += k[j + 2] * tmp.at(std::min(2 * x, w - 1), std::clamp(2 * y + j, 0, h - 1));
            }
            dst.at(x, y) = s;
        }
    }
    return dst;
}

// Bilinear resize of a flow field to a finer grid; vectors scale with the
// resolution change.
FlowField upsample_flow(const FlowField& coarse, int w, int h) {
    FlowField fine(w, h);
    const double sx = static_cast<double>(coarse.width) / w;
    const double sy = static_cast<double>(coarse.height) / h;
    const double scale_x = static_cast<double>(w) / coarse.width;
    const double scale_y = static_cast<double>(h) / coarse.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double cx = clampd((x + 0.5) * sx - 0.5, 0.0, coarse.width - 1.0);
            const double cy = clampd((y + 0.5) * sy - 0.5, 0.0, coarse.height - 1.0);
            const int x0 = static_cast<int>(std::floor(cx));
            const int y0 = static_cast<int>(std::floor(cy));
            const int x1 = std::min(x0 + 1, coarse.width - 1);
            const int y1 = std::min(y0 + 1, coarse.height - 1);
            const double fx = cx - x0, fy = cy - y0;
            const Vec2 v00 = coarse.at(x0, y0), v10 = coarse.at(x1, y0);
            const Vec2 v01 = coarse.at(x0, y1), v11 = coarse.at(x1, y1);
            Vec2 v;
            v.x = (1 - fy) * ((1 - fx) * v00.x + fx * v10.x) + fy * ((1 - fx) * v01.x + fx * v11.x);
            v.y = (1 - fy) * ((1 - fx) * v00.y + fx * v10.y) + fy * ((1 - fx) * v01.y + fx * v11.y);
            fine.at(x, y) = {v.x * scale_x, v.y * scale_y};
        }
    }
    return fine;
}

// Box sums over a (2r+1)^2 window via running row/column accumulation, with
// windows clipped at the borders. counts receives the in-bounds pixel count.
void box_sum(const ScalarGrid& src, int radius, ScalarGrid& dst) {
    const int w = src.width, h = src.height;
    ScalarGrid rows(w, h);
    for (int y = 0; y < h; ++y) {
        double acc = 0.0;
        for (int x = 0; x <= radius && x < w; ++x) acc += src.at(x, y);
        rows.at(0, y) = acc;
        for (int x = 1; x < w; ++x) {
            if (x + radius < w) acc += src.at(x + radius, y);
            if (x - radius - 1 >= 0) acc -= src.at(x - radius - 1, y);
            rows.at(x, y) = acc;
        }
    }
    for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int y = 0; y <= radius && y < h; ++y) acc += rows.at(x, y);
        dst.at(x, 0) = acc;
        for (int y = 1; y < h; ++y) {
            if (y + radius < h) acc += rows.at(x, y + radius);
            if (y - radius - 1 >= 0) acc -= rows.at(x, y - radius - 1);
            dst.at(x, y) = acc;
        }
    }
}

ScalarGrid window_counts(int w, int h, int radius) {
    ScalarGrid ones(w, h, 1.0);
    ScalarGrid counts(w, h);
    box_sum(ones, radius, counts);
    return counts;
}

void gradients(const ScalarGrid& img, ScalarGrid& gx, ScalarGrid& gy) {
    const int w = img.width, h = img.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            gx.at(x, y) = 0.5 * (img.at(xp, y) - img.at(xm, y));
            gy.at(x, y) = 0.5 * (img.at(x, yp) - img.at(x, ym));
        }
    }
}

// One least-squares refinement sweep at a single pyramid level. Box-filtered
// sums make the uniform-window solve O(1) per pixel.
void refine_level(const ScalarGrid& prev, const ScalarGrid& curr, const FlowParams& params,
                  FlowField& flow) {
    const int w = prev.width, h = prev.height;
    const int r = params.window_radius;
    ScalarGrid gx(w, h), gy(w, h);
    gradients(prev, gx, gy);

    ScalarGrid gxx(w, h), gxy(w, h), gyy(w, h);
    {
        ScalarGrid pxx(w, h), pxy(w, h), pyy(w, h);
        for (size_t i = 0; i < pxx.values.size(); ++i) {
            pxx.values[i] = gx.values[i] * gx.values[i];
            pxy.values[i] = gx.values[i] * gy.values[i];
            pyy.values[i] = gy.values[i] * gy.values[i];
        }
        box_sum(pxx, r, gxx);
        box_sum(pxy, r, gxy);
        box_sum(pyy, r, gyy);
    }
    const ScalarGrid counts = window_counts(w, h, r);

    ScalarGrid it(w, h), pxt(w, h), pyt(w, h), bx(w, h), by(w, h);
    for (int iter = 0; iter < params.iterations_per_level; ++iter) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Vec2 v = flow.at(x, y);
                it.at(x, y) = sample_bilinear(curr, x + v.x, y + v.y) - prev.at(x, y);
            }
        }
        for (size_t i = 0; i < it.values.size(); ++i) {
            pxt.values[i] = gx.values[i] * it.values[i];
            pyt.values[i] = gy.values[i] * it.values[i];
        }
        box_sum(pxt, r, bx);
        box_sum(pyt, r, by);

        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double n = counts.at(x, y);
                const double a = gxx.at(x, y) / n;
                const double b = gxy.at(x, y) / n;
                const double c = gyy.at(x, y) / n;
                const double tr = 0.5 * (a + c);
                const double det_part = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
                const double lambda_min = tr - det_part;
                if (lambda_min < params.min_eigen) continue;  // keep coarse estimate
                const double det = a * c - b * b;
                if (det <= 0.0) continue;
                const double rx = -bx.at(x, y) / n;
                const double ry = -by.at(x, y) / n;
                const double du = (c * rx - b * ry) / det;
                const double dv = (-b * rx + a * ry) / det;
                Vec2& v = flow.at(x, y);
                v.x += du;
                v.y += dv;
            }
        }
    }
}

// Finest-level sweep with range-weighted windows: pixels whose prev-frame
// luminance differs from the window center contribute less, which keeps the
// solve from blending across motion boundaries (the limb/torso contour case).
void refine_level_bilateral(const ScalarGrid& prev, const ScalarGrid& curr,
                            const FlowParams& params, FlowField& flow) {
    const int w = prev.width, h = prev.height;
    const int r = params.window_radius;
    const double inv_2sr2 = 1.0 / (2.0 * 0.15 * 0.15);  // range sigma in luminance units
    ScalarGrid gx(w, h), gy(w, h);
    gradients(prev, gx, gy);

    ScalarGrid it(w, h);
    for (int iter = 0; iter < params.iterations_per_level; ++iter) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Vec2 v = flow.at(x, y);
                it.at(x, y) = sample_bilinear(curr, x + v.x, y + v.y) - prev.at(x, y);
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double center = prev.at(x, y);
                double a = 0.0, b = 0.0, c = 0.0, rx = 0.0, ry = 0.0, n = 0.0;
                for (int j = -r; j <= r; ++j) {
                    const int yj = y + j;
                    if (yj < 0 || yj >= h) continue;
                    for (int i = -r; i <= r; ++i) {
                        const int xi = x + i;
                        if (xi < 0 || xi >= w) continue;
                        const double dl = prev.at(xi, yj) - center;
                        const double wgt = std::exp(-dl * dl * inv_2sr2);
                        const double gxv = gx.at(xi, yj), gyv = gy.at(xi, yj);
                        a += wgt * gxv * gxv;
                        b += wgt * gxv * gyv;
                        c += wgt * gyv * gyv;
                        rx -= wgt * gxv * it.at(xi, yj);
                        ry -= wgt * gyv * it.at(xi, yj);
                        n += wgt;
                    }
                }
                if (n <= 0.0) continue;
                a /= n;
                b /= n;
                c /= n;
                const double tr = 0.5 * (a + c);
                const double det_part = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
                if (tr - det_part < params.min_eigen) continue;
                const double det = a * c - b * b;
                if (det <= 0.0) continue;
                Vec2& v = flow.at(x, y);
                v.x += (c * (rx / n) - b * (ry / n)) / det;
                v.y += (-b * (rx / n) + a * (ry / n)) / det;
            }
        }
    }
}

}  // namespace

double sample_bilinear(const ScalarGrid& g, double x, double y) {
    const double cx = clampd(x, 0.0, g.width - 1.0);
    const double cy = clampd(y, 0.0, g.height - 1.0);
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, g.width - 1);
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double fx = cx - x0, fy = cy - y0;
    return (1 - fy) * ((1 - fx) * g.at(x0, y0) + fx * g.at(x1, y0)) +
           fy * ((1 - fx) * g.at(x0, y1) + fx * g.at(x1, y1));
}

Vec2 sample_flow(const FlowField& v, Vec2 p) {
    const double cx = clampd(p.x, 0.0, v.width - 1.0);
    const double cy = clampd(p.y, 0.0, v.height - 1.0);
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, v.width - 1);
    const int y1 = std::min(y0 + 1, v.height - 1);
    const double fx = cx - x0, fy = cy - y0;
    const Vec2 v00 = v.at(x0, y0), v10 = v.at(x1, y0);
    const Vec2 v01 = v.at(x0, y1), v11 = v.at(x1, y1);
    Vec2 out;
    out.x = (1 - fy) * ((1 - fx) * v00.x + fx * v10.x) + fy * ((1 - fx) * v01.x + fx * v11.x);
    out.y = (1 - fy) * ((1 - fx) * v00.y + fx * v10.y) + fy * ((1 - fx) * v01.y + fx * v11.y);
    return out;
}

FlowField estimate_flow(const ScalarGrid& prev, const ScalarGrid& curr, const FlowParams& params) {
    validate(params);
    require_same_shape(prev.width, prev.height, curr.width, curr.height, "estimate_flow");

    // Cap the pyramid so the coarsest level still holds the window.
    int levels = params.pyramid_levels;
    {
        int min_dim = std::min(prev.width, prev.height);
        int usable = 1;
        while (usable < levels && (min_dim / 2) >= 2 * params.window_radius + 1) {
            min_dim /= 2;
            ++usable;
        }
        levels = usable;
    }

    std::vector<ScalarGrid> pyr_prev{prev}, pyr_curr{curr};
    for (int l = 1; l < levels; ++l) {
        pyr_prev.push_back(downsample(pyr_prev.back()));
        pyr_curr.push_back(downsample(pyr_curr.back()));
    }

    FlowField flow(pyr_prev.back().width, pyr_prev.back().height);
    for (int l = levels - 1; l >= 0; --l) {
        if (l != levels - 1) {
            flow = upsample_flow(flow, pyr_prev[l].width, pyr_prev[l].height);
        }
        if (l == 0) {
            refine_level_bilateral(pyr_prev[l], pyr_curr[l], params, flow);
        } else {
            refine_level(pyr_prev[l], pyr_curr[l], params, flow);
        }
    }
    return flow;
}

FlowField compose_flows(const FlowField& v_ab, const FlowField& v_bc) {
    require_same_shape(v_ab.width, v_ab.height, v_bc.width, v_bc.height, "compose_flows");
    FlowField out(v_ab.width, v_ab.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const Vec2 first = v_ab.at(x, y);
            const Vec2 second = sample_flow(v_bc, {x + first.x, y + first.y});
            out.at(x, y) = first + second;
        }
    }
    return out;
}

}  // namespace fded
