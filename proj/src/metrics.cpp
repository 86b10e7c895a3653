#include "fded/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fded {

namespace {

long overlap_count(const EdgeMap& a, const EdgeMap& dilated_b) {
    long n = 0;
    for (size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] && dilated_b.bits[i]) ++n;
    }
    return n;
}

}  // namespace

EdgeScore edge_prf(const EdgeMap& pred, const EdgeMap& oracle, int tol) {
    require_same_shape(pred.width, pred.height, oracle.width, oracle.height, "edge_prf");
    if (tol < 0) throw ParamError("edge_prf: tolerance must be >= 0");

    EdgeScore s;
    s.tolerance = tol;
    s.total_pred = static_cast<long>(pred.count());
    s.total_oracle = static_cast<long>(oracle.count());

    const EdgeMap oracle_zone = dilate_edges(oracle, tol);
    const EdgeMap pred_zone = dilate_edges(pred, tol);
    s.matched_pred = overlap_count(pred, oracle_zone);
    s.matched_oracle = overlap_count(oracle, pred_zone);

    if (s.total_pred == 0) {
        s.empty_pred = true;
        s.precision = 0.0;
    } else {
        s.precision = static_cast<double>(s.matched_pred) / s.total_pred;
    }
    if (s.total_oracle == 0) {
        s.empty_oracle = true;
        s.recall = 1.0;
    } else {
        s.recall = static_cast<double>(s.matched_oracle) / s.total_oracle;
    }
    s.f1 = (s.precision > 0.0 && s.recall > 0.0)
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

double ssim(const ScalarGrid& a, const ScalarGrid& b, const SsimParams& params) {
    require_same_shape(a.width, a.height, b.width, b.height, "ssim");
    const int w = a.width, h = a.height;
    const int win = params.window;
    if (win < 1 || win > w || win > h) {
        throw ParamError("ssim: window " + std::to_string(win) + " does not fit " +
                         std::to_string(w) + "x" + std::to_string(h));
    }

    // Summed-area tables for window means of a, b, a^2, b^2, ab.
    const int sw = w + 1, sh = h + 1;
    std::vector<double> sa(static_cast<size_t>(sw) * sh, 0.0), sb(sa), saa(sa), sbb(sa), sab(sa);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y + 1) * sw + (x + 1);
            const size_t up = i - sw, left = i - 1, diag = up - 1;
            const double av = a.at(x, y), bv = b.at(x, y);
            sa[i] = av + sa[up] + sa[left] - sa[diag];
            sb[i] = bv + sb[up] + sb[left] - sb[diag];
            saa[i] = av * av + saa[up] + saa[left] - saa[diag];
            sbb[i] = bv * bv + sbb[up] + sbb[left] - sbb[diag];
            sab[i] = av * bv + sab[up] + sab[left] - sab[diag];
        }
    }
    auto window_sum = [&](const std::vector<double>& s, int x, int y) {
        const size_t x0 = static_cast<size_t>(x), y0 = static_cast<size_t>(y);
        const size_t x1 = x0 + win, y1 = y0 + win;
        return s[y1 * sw + x1] - s[y0 * sw + x1] - s[y1 * sw + x0] + s[y0 * sw + x0];
    };

    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    const double n = static_cast<double>(win) * win;

    double acc = 0.0;
    long windows = 0;
    for (int y = 0; y + win <= h; ++y) {
        for (int x = 0; x + win <= w; ++x) {
            const double mu_a = window_sum(sa, x, y) / n;
            const double mu_b = window_sum(sb, x, y) / n;
            const double var_a = window_sum(saa, x, y) / n - mu_a * mu_a;
            const double var_b = window_sum(sbb, x, y) / n - mu_b * mu_b;
            const double cov = window_sum(sab, x, y) / n - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            acc += num / den;
            ++windows;
        }
    }
    return acc / windows;
}

ScalarGrid to_grid(const EdgeMap& e) {
    ScalarGrid g(e.width, e.height);
    for (size_t i = 0; i < e.bits.size(); ++i) g.values[i] = e.bits[i] ? 1.0 : 0.0;
    return g;
}

double temporal_consistency(const std::vector<ScalarGrid>& frames, const SsimParams& params) {
    if (frames.size() < 2) throw ParamError("temporal_consistency: needs at least 2 frames");
    double acc = 0.0;
    for (size_t i = 0; i + 1 < frames.size(); ++i) {
        acc += ssim(frames[i], frames[i + 1], params);
    }
    return acc / static_cast<double>(frames.size() - 1);
}

double temporal_consistency(const std::vector<EdgeMap>& frames, const SsimParams& params) {
    if (frames.size() < 2) throw ParamError("temporal_consistency: needs at least 2 frames");
    std::vector<ScalarGrid> grids;
    grids.reserve(frames.size());
    for (const EdgeMap& e : frames) grids.push_back(to_grid(e));
    return temporal_consistency(grids, params);
}

}  // namespace fded
