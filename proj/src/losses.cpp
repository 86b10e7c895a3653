#include "fded/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fded {

namespace {

void require_same_layout(const PatchSet& y, const PatchSet& x, const char* what) {
    if (y.n != x.n || y.patch_px != x.patch_px) {
        throw ShapeError(std::string(what) + ": patch sets differ (" + std::to_string(y.n) +
                         " vs " + std::to_string(x.n) + " patches)");
    }
}

std::vector<int> edge_indices(const PatchSet& x) {
    std::vector<int> idx;
    for (int i = 0; i < x.n; ++i) {
        if (x.edge_flags[static_cast<size_t>(i)]) idx.push_back(i);
    }
    return idx;
}

// K negatives per anchor, uniform without replacement from the edge pool
// minus the anchor, in anchor order from a single seeded stream.
std::vector<std::vector<int>> sample_negatives(const std::vector<int>& pool, int k,
                                               std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint64_t>(0x9d2c5680u), seed};
    std::mt19937_64 rng(seq);
    std::vector<std::vector<int>> out(pool.size());
    std::vector<int> candidates;
    for (size_t a = 0; a < pool.size(); ++a) {
        candidates.clear();
        for (int p : pool) {
            if (p != pool[a]) candidates.push_back(p);
        }
        const int take = std::min<int>(k, static_cast<int>(candidates.size()));
        for (int t = 0; t < take; ++t) {
            std::uniform_int_distribution<size_t> pick(t, candidates.size() - 1);
            std::swap(candidates[t], candidates[pick(rng)]);
            out[a].push_back(candidates[t]);
        }
    }
    return out;
}

double norm(const double* v, int len) {
    double s = 0.0;
    for (int i = 0; i < len; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

}  // namespace

PatchSet patchify(const std::array<ScalarGrid, 3>& image, const EdgeMap& e, int patch_px) {
    if (patch_px < 1) throw ParamError("patchify: patch_px must be >= 1");
    const int w = image[0].width, h = image[0].height;
    require_same_shape(w, h, e.width, e.height, "patchify");
    for (const ScalarGrid& ch : image) {
        require_same_shape(w, h, ch.width, ch.height, "patchify");
    }

    PatchSet set;
    set.patch_px = patch_px;
    set.cols = (w + patch_px - 1) / patch_px;
    set.rows = (h + patch_px - 1) / patch_px;
    set.pad_x = set.cols * patch_px - w;
    set.pad_y = set.rows * patch_px - h;
    set.n = set.cols * set.rows;
    set.data.assign(static_cast<size_t>(set.n) * set.patch_len(), 0.0);
    set.edge_flags.assign(static_cast<size_t>(set.n), 0);

    for (int py = 0; py < set.rows; ++py) {
        for (int px = 0; px < set.cols; ++px) {
            const int patch_idx = py * set.cols + px;
            double* dst = set.patch(patch_idx);
            bool flag = false;
            for (int j = 0; j < patch_px; ++j) {
                for (int i = 0; i < patch_px; ++i) {
                    // Replicate out-of-range pixels; the flag only looks at
                    // the in-image footprint.
                    const int sx = std::min(px * patch_px + i, w - 1);
                    const int sy = std::min(py * patch_px + j, h - 1);
                    const size_t base = (static_cast<size_t>(j) * patch_px + i) * 3;
                    dst[base + 0] = image[0].at(sx, sy);
                    dst[base + 1] = image[1].at(sx, sy);
                    dst[base + 2] = image[2].at(sx, sy);
                    if (px * patch_px + i < w && py * patch_px + j < h && e.test(sx, sy)) {
                        flag = true;
                    }
                }
            }
            set.edge_flags[static_cast<size_t>(patch_idx)] = flag ? 1 : 0;
        }
    }
    return set;
}

std::vector<double> patchify_edge_channel(const EdgeMap& e, int patch_px) {
    if (patch_px < 1) throw ParamError("patchify_edge_channel: patch_px must be >= 1");
    const int w = e.width, h = e.height;
    const int cols = (w + patch_px - 1) / patch_px;
    const int rows = (h + patch_px - 1) / patch_px;
    std::vector<double> out(static_cast<size_t>(cols) * rows * patch_px * patch_px, 0.0);
    for (int py = 0; py < rows; ++py) {
        for (int px = 0; px < cols; ++px) {
            double* dst =
                out.data() + (static_cast<size_t>(py) * cols + px) * patch_px * patch_px;
            for (int j = 0; j < patch_px; ++j) {
                for (int i = 0; i < patch_px; ++i) {
                    const int sx = std::min(px * patch_px + i, w - 1);
                    const int sy = std::min(py * patch_px + j, h - 1);
                    dst[static_cast<size_t>(j) * patch_px + i] = e.test(sx, sy) ? 1.0 : 0.0;
                }
            }
        }
    }
    return out;
}

double recon_loss(const PatchSet& y, const PatchSet& x) {
    require_same_layout(y, x, "recon_loss");
    double s = 0.0;
    for (size_t i = 0; i < y.data.size(); ++i) {
        const double d = y.data[i] - x.data[i];
        s += d * d;
    }
    return s;
}

double cosine(const double* a, const double* b, int len) {
    const double na = norm(a, len), nb = norm(b, len);
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    double dot = 0.0;
    for (int i = 0; i < len; ++i) dot += a[i] * b[i];
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double contrastive_loss(const PatchSet& y, const PatchSet& x, const LossParams& params,
                        ContrastiveDiag* diag) {
    require_same_layout(y, x, "contrastive_loss");
    if (params.delta <= 0.0) throw ParamError("contrastive_loss: delta must be > 0");
    if (params.negatives_per_anchor < 1) throw ParamError("contrastive_loss: K must be >= 1");

    const std::vector<int> pool = edge_indices(x);
    if (diag) *diag = {};
    if (pool.size() < 2) {
        if (diag) diag->degenerate_pool = true;
        return 0.0;
    }
    const auto negatives = sample_negatives(pool, params.negatives_per_anchor, params.rng_seed);

    const int len = y.patch_len();
    double loss = 0.0;
    int pairs = 0;
    for (size_t a = 0; a < pool.size(); ++a) {
        const int j = pool[a];
        const double cos_pos = cosine(y.patch(j), x.patch(j), len);
        for (int k : negatives[a]) {
            const double cos_neg = cosine(y.patch(j), x.patch(k), len);
            loss += std::max(0.0, cos_neg - cos_pos + params.delta);
            ++pairs;
        }
    }
    if (diag) {
        diag->anchors = static_cast<int>(pool.size());
        diag->pairs = pairs;
    }
    return loss;
}

double total_loss(const PatchSet& y, const PatchSet& x, const LossParams& params) {
    return recon_loss(y, x) + contrastive_loss(y, x, params);
}

std::vector<double> loss_gradients(const PatchSet& y, const PatchSet& x,
                                   const LossParams& params) {
    require_same_layout(y, x, "loss_gradients");
    const int len = y.patch_len();
    std::vector<double> grad(y.data.size(), 0.0);

    for (size_t i = 0; i < y.data.size(); ++i) {
        grad[i] = 2.0 * (y.data[i] - x.data[i]);
    }

    const std::vector<int> pool = edge_indices(x);
    if (pool.size() < 2) return grad;
    const auto negatives = sample_negatives(pool, params.negatives_per_anchor, params.rng_seed);

    // d cos(y, c) / dy = c/(|y||c|) - cos(y, c) * y/|y|^2, zero when either
    // norm vanishes; hinge subgradient at the kink is 0.
    for (size_t a = 0; a < pool.size(); ++a) {
        const int j = pool[a];
        const double* yj = y.patch(j);
        const double ny = norm(yj, len);
        if (ny < 1e-12) continue;
        const double* xj = x.patch(j);
        const double cos_pos = cosine(yj, xj, len);
        const double nxj = norm(xj, len);
        double* gj = grad.data() + static_cast<size_t>(j) * len;
        for (int k : negatives[a]) {
            const double* xk = x.patch(k);
            const double cos_neg = cosine(yj, xk, len);
            if (cos_neg - cos_pos + params.delta <= 0.0) continue;
            const double nxk = norm(xk, len);
            for (int c = 0; c < len; ++c) {
                double term = 0.0;
                if (nxk >= 1e-12) {
                    term += xk[c] / (ny * nxk) - cos_neg * yj[c] / (ny * ny);
                }
                if (nxj >= 1e-12) {
                    term -= xj[c] / (ny * nxj) - cos_pos * yj[c] / (ny * ny);
                }
                gj[c] += term;
            }
        }
    }
    return grad;
}

TrainResult train_toy(const PatchSet& z_patches, const std::vector<double>& e_patches,
                      const PatchSet& x_patches, const LossParams& params, double lr, int iters,
                      bool use_contrastive, std::uint64_t seed) {
    require_same_layout(z_patches, x_patches, "train_toy");
    if (lr < 0.0) throw ParamError("train_toy: lr must be >= 0");
    if (iters < 1) throw ParamError("train_toy: iters must be >= 1");
    const int n = z_patches.n;
    const int plane = z_patches.patch_px * z_patches.patch_px;
    if (e_patches.size() != static_cast<size_t>(n) * plane) {
        throw ShapeError("train_toy: edge patch plane does not match the image tiling");
    }

    TrainResult result;
    ToyStylizer& model = result.model;
    model.patch_px = z_patches.patch_px;
    const int in_len = model.in_len(), out_len = model.out_len();
    model.weights.resize(static_cast<size_t>(out_len) * in_len);
    model.bias.assign(static_cast<size_t>(out_len), 0.0);
    {
        std::seed_seq seq{static_cast<std::uint64_t>(0x853c49e6u), seed};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> init(-0.01, 0.01);
        for (double& w : model.weights) w = init(rng);
    }

    // Concatenated (Z, e) input per patch, built once.
    std::vector<double> inputs(static_cast<size_t>(n) * in_len);
    for (int i = 0; i < n; ++i) {
        double* dst = inputs.data() + static_cast<size_t>(i) * in_len;
        const double* z = z_patches.patch(i);
        std::copy(z, z + out_len, dst);
        const double* e = e_patches.data() + static_cast<size_t>(i) * plane;
        std::copy(e, e + plane, dst + out_len);
    }

    PatchSet y = x_patches;  // layout and flags; data overwritten by the forward pass
    std::vector<double> grad_w(model.weights.size());
    std::vector<double> grad_b(model.bias.size());

    for (int iter = 0; iter < iters; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double* in = inputs.data() + static_cast<size_t>(i) * in_len;
            double* out = y.patch(i);
            for (int r = 0; r < out_len; ++r) {
                const double* wrow = model.weights.data() + static_cast<size_t>(r) * in_len;
                double s = model.bias[static_cast<size_t>(r)];
                for (int c = 0; c < in_len; ++c) s += wrow[c] * in[c];
                out[r] = s;
            }
        }

        const double recon = recon_loss(y, x_patches);
        if (!std::isfinite(recon)) {
            throw NumericError("train_toy: non-finite loss at iteration " + std::to_string(iter));
        }
        result.recon_history.push_back(recon);

        LossParams iter_params = params;
        std::seed_seq seq{params.rng_seed, static_cast<std::uint64_t>(iter)};
        std::vector<std::uint32_t> mixed(2);
        seq.generate(mixed.begin(), mixed.end());
        iter_params.rng_seed = (static_cast<std::uint64_t>(mixed[0]) << 32) | mixed[1];

        std::vector<double> gy =
            use_contrastive ? loss_gradients(y, x_patches, iter_params)
                            : [&] {
                                  std::vector<double> g(y.data.size());
                                  for (size_t i = 0; i < g.size(); ++i) {
                                      g[i] = 2.0 * (y.data[i] - x_patches.data[i]);
                                  }
                                  return g;
                              }();

        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double* in = inputs.data() + static_cast<size_t>(i) * in_len;
            const double* g = gy.data() + static_cast<size_t>(i) * out_len;
            for (int r = 0; r < out_len; ++r) {
                grad_b[static_cast<size_t>(r)] += g[r];
                double* wrow = grad_w.data() + static_cast<size_t>(r) * in_len;
                for (int c = 0; c < in_len; ++c) wrow[c] += g[r] * in[c];
            }
        }
        for (size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= lr * grad_w[i];
        for (size_t i = 0; i < model.bias.size(); ++i) model.bias[i] -= lr * grad_b[i];
    }
    return result;
}

}  // namespace fded
