#pragma once

#include "fded/raster.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fded {

// Non-overlapping patch decomposition of an RGB image. Per-patch layout is
// pixel-major with interleaved RGB: component (py*P + px)*3 + ch.
struct PatchSet {
    int n = 0;
    int patch_px = 8;
    int cols = 0;
    int rows = 0;
    int pad_x = 0;  // replicate-padding applied on the right/bottom, diagnostics
    int pad_y = 0;
    std::vector<double> data;             // n * patch_px*patch_px*3, values in [0,1]
    std::vector<std::uint8_t> edge_flags;  // per patch: footprint intersects e

    int patch_len() const { return patch_px * patch_px * 3; }
    double* patch(int i) { return data.data() + static_cast<size_t>(i) * patch_len(); }
    const double* patch(int i) const { return data.data() + static_cast<size_t>(i) * patch_len(); }
};

struct LossParams {
    double delta = 0.1;            // ranking margin
    int negatives_per_anchor = 4;  // K
    std::uint64_t rng_seed = 0;
};

// Affine per-patch map from concatenated (Z patch, e patch) inputs, length
// P*P*4, to an output patch of length P*P*3. Stands in for the stylization
// network at desk scale.
struct ToyStylizer {
    int patch_px = 8;
    std::vector<double> weights;  // out_len x in_len, row-major
    std::vector<double> bias;     // out_len

    int in_len() const { return patch_px * patch_px * 4; }
    int out_len() const { return patch_px * patch_px * 3; }
};

PatchSet patchify(const std::array<ScalarGrid, 3>& image, const EdgeMap& e, int patch_px);

// Single-channel patches of the edge map in the same tiling, {0,1} values.
std::vector<double> patchify_edge_channel(const EdgeMap& e, int patch_px);

double recon_loss(const PatchSet& y, const PatchSet& x);

// dot(a,b)/(|a||b|), 0 when either norm < 1e-12, clamped into [-1, 1].
double cosine(const double* a, const double* b, int len);

struct ContrastiveDiag {
    int anchors = 0;
    int pairs = 0;
    bool degenerate_pool = false;  // fewer than 2 edge patches
};

// Hinge ranking loss over edge-flagged anchor patches against K hard
// negatives sampled (seeded, without replacement) from the edge-flagged pool.
double contrastive_loss(const PatchSet& y, const PatchSet& x, const LossParams& params,
                        ContrastiveDiag* diag = nullptr);

double total_loss(const PatchSet& y, const PatchSet& x, const LossParams& params);

// Analytic gradient of total_loss with respect to every component of y.
std::vector<double> loss_gradients(const PatchSet& y, const PatchSet& x,
                                   const LossParams& params);

struct TrainResult {
    ToyStylizer model;
    std::vector<double> recon_history;  // recon loss at each iteration, pre-update
};

// Full-batch gradient descent of the affine patch map on total_loss (or the
// reconstruction term alone). Negatives are resampled each iteration from a
// seed derived from (params.rng_seed, iteration).
TrainResult train_toy(const PatchSet& z_patches, const std::vector<double>& e_patches,
                      const PatchSet& x_patches, const LossParams& params, double lr, int iters,
                      bool use_contrastive, std::uint64_t seed);

}  // namespace fded
