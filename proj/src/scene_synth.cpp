#include "fded/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fded {

namespace {

constexpr std::array<double, 3> kPaper{1.0, 1.0, 1.0};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double hash01(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x9e3779b9ull ^
                                                   splitmix64(static_cast<std::uint64_t>(iy))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double texture_value(const TextureSpec& tex, double u, double v) {
    if (tex.type == TextureSpec::Type::kStripes) {
        const double proj = u * std::cos(tex.angle) + v * std::sin(tex.angle);
        return 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * proj / tex.period + tex.phase);
    }
    const double cu = u / tex.period, cv = v / tex.period;
    const double fu = std::floor(cu), fv = std::floor(cv);
    const double tu = cu - fu, tv = cv - fv;
    const auto iu = static_cast<std::int64_t>(fu);
    const auto iv = static_cast<std::int64_t>(fv);
    const double v00 = hash01(tex.noise_seed, iu, iv);
    const double v10 = hash01(tex.noise_seed, iu + 1, iv);
    const double v01 = hash01(tex.noise_seed, iu, iv + 1);
    const double v11 = hash01(tex.noise_seed, iu + 1, iv + 1);
    return (1 - tv) * ((1 - tu) * v00 + tu * v10) + tv * ((1 - tu) * v01 + tu * v11);
}

std::array<double, 3> texture_color(const TextureSpec& tex, double u, double v) {
    const double t = texture_value(tex, u, v);
    return {tex.color_lo[0] + t * (tex.color_hi[0] - tex.color_lo[0]),
            tex.color_lo[1] + t * (tex.color_hi[1] - tex.color_lo[1]),
            tex.color_lo[2] + t * (tex.color_hi[2] - tex.color_lo[2])};
}

double dist_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    }
    const double dx = p.x - (a.x + t * ab.x);
    const double dy = p.y - (a.y + t * ab.y);
    return std::hypot(dx, dy);
}

// Negative inside, positive outside.
double shape_sdf(const std::variant<CapsuleShape, PolygonShape>& shape, Vec2 local) {
    if (const auto* cap = std::get_if<CapsuleShape>(&shape)) {
        return dist_to_segment(local, cap->p0, cap->p1) - cap->radius;
    }
    const auto& poly = std::get<PolygonShape>(shape).vertices;
    double dist = std::numeric_limits<double>::max();
    bool inside = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        dist = std::min(dist, dist_to_segment(local, poly[j], poly[i]));
        const bool crosses = (poly[i].y > local.y) != (poly[j].y > local.y);
        if (crosses) {
            const double xint =
                poly[j].x + (local.y - poly[j].y) / (poly[i].y - poly[j].y) * (poly[i].x - poly[j].x);
            if (local.x < xint) inside = !inside;
        }
    }
    return inside ? -dist : dist;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        a += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    }
    return 0.5 * std::abs(a);
}

void validate(const SceneSpec& spec) {
    if (spec.parts.empty()) throw ConfigError("scene: parts must be non-empty");
    if (spec.frames < 1) throw ConfigError("scene: frames must be >= 1");
    if (spec.depth_gap < 0.0) throw ConfigError("scene: depth_gap must be >= 0");
    if (spec.width < 1 || spec.height < 1) throw ConfigError("scene: canvas must be positive");
    for (const Part& part : spec.parts) {
        if (const auto* cap = std::get_if<CapsuleShape>(&part.shape)) {
            if (cap->radius <= 0.0) {
                throw ConfigError("scene: part '" + part.name + "' has zero area");
            }
        } else {
            const auto& poly = std::get<PolygonShape>(part.shape).vertices;
            if (poly.size() < 3 || polygon_area(poly) <= 0.0) {
                throw ConfigError("scene: part '" + part.name + "' has zero area");
            }
        }
        if (!part.angles.empty() && static_cast<int>(part.angles.size()) != spec.frames) {
            throw ConfigError("scene: part '" + part.name +
                              "' trajectory length does not match frame count");
        }
        if (part.texture.period <= 0.0) {
            throw ConfigError("scene: part '" + part.name + "' texture period must be > 0");
        }
    }
}

double part_angle(const Part& part, int frame) {
    return part.angles.empty() ? 0.0 : part.angles[static_cast<size_t>(frame)];
}

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Coverage of one frame: per-pixel visible label, cover count and the visible
// part's sdf/local coords for shading.
struct CoverField {
    std::vector<int> label;        // visible part, -1 background
    std::vector<std::uint8_t> cover;  // number of covering parts
    std::vector<double> sdf;       // visible part's signed distance
    std::vector<Vec2> local;       // pixel in the visible part's local frame
};

CoverField cover_frame(const SceneSpec& spec, int frame) {
    const int w = spec.width, h = spec.height;
    CoverField f;
    f.label.assign(static_cast<size_t>(w) * h, -1);
    f.cover.assign(static_cast<size_t>(w) * h, 0);
    f.sdf.assign(static_cast<size_t>(w) * h, 0.0);
    f.local.assign(static_cast<size_t>(w) * h, Vec2{});

    for (size_t pi = 0; pi < spec.parts.size(); ++pi) {
        const Part& part = spec.parts[pi];
        const double theta = part_angle(part, frame);
        const double depth = spec.part_depth(pi);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Vec2 local = rotate(Vec2{x - part.pivot.x, y - part.pivot.y}, -theta);
                const double sd = shape_sdf(part.shape, local);
                if (sd > 0.0) continue;
                const size_t idx = static_cast<size_t>(y) * w + x;
                f.cover[idx] = static_cast<std::uint8_t>(f.cover[idx] + 1);
                const int cur = f.label[idx];
                // nearest depth wins; ties go to the later-listed part
                if (cur < 0 || depth <= spec.part_depth(static_cast<size_t>(cur))) {
                    f.label[idx] = static_cast<int>(pi);
                    f.sdf[idx] = sd;
                    f.local[idx] = local;
                }
            }
        }
    }
    return f;
}

void gaussian_blur_inplace(ScalarGrid& img, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(static_cast<size_t>(2 * radius + 1));
    for (int i = -radius; i <= radius; ++i) {
        k[static_cast<size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    }
    const int w = img.width, h = img.height;
    ScalarGrid tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0, n = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xi = x + i;
                if (xi < 0 || xi >= w) continue;
                s += k[static_cast<size_t>(i + radius)] * img.at(xi, y);
                n += k[static_cast<size_t>(i + radius)];
            }
            tmp.at(x, y) = s / n;
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            double s = 0.0, n = 0.0;
            for (int j = -radius; j <= radius; ++j) {
                const int yj = y + j;
                if (yj < 0 || yj >= h) continue;
                s += k[static_cast<size_t>(j + radius)] * tmp.at(x, yj);
                n += k[static_cast<size_t>(j + radius)];
            }
            img.at(x, y) = s / n;
        }
    }
}

size_t visible_area(const CoverField& f) {
    return static_cast<size_t>(std::count_if(f.label.begin(), f.label.end(),
                                             [](int l) { return l >= 0; }));
}

}  // namespace

double scene_background_sentinel(const SceneSpec& spec) {
    double dmin = std::numeric_limits<double>::max();
    double dmax = std::numeric_limits<double>::lowest();
    for (size_t i = 0; i < spec.parts.size(); ++i) {
        dmin = std::min(dmin, spec.part_depth(i));
        dmax = std::max(dmax, spec.part_depth(i));
    }
    return dmax + std::max(10.0 * (dmax - dmin), 1.0);
}

std::vector<FrameTruth> render_sequence(const SceneSpec& spec) {
    validate(spec);
    const int w = spec.width, h = spec.height;
    const double sentinel = scene_background_sentinel(spec);

    std::vector<CoverField> covers;
    covers.reserve(static_cast<size_t>(spec.frames));
    for (int i = 0; i < spec.frames; ++i) covers.push_back(cover_frame(spec, i));
    const double rest_area = static_cast<double>(visible_area(covers[0]));

    std::vector<FrameTruth> out(static_cast<size_t>(spec.frames));
    for (int fi = 0; fi < spec.frames; ++fi) {
        const CoverField& cov = covers[static_cast<size_t>(fi)];
        FrameTruth& ft = out[static_cast<size_t>(fi)];
        ft.labels = cov.label;
        ft.depth = ScalarGrid(w, h, sentinel);
        for (auto& ch : ft.clean) ch = ScalarGrid(w, h);
        for (auto& ch : ft.rgb) ch = ScalarGrid(w, h);
        ft.oracle_edges = EdgeMap(w, h);
        ft.occluded_boundary = EdgeMap(w, h);
        ft.flow_to_next = FlowField(w, h);

        bool any_overlap = false;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t idx = static_cast<size_t>(y) * w + x;
                const int li = cov.label[idx];
                if (cov.cover[idx] >= 2) any_overlap = true;

                std::array<double, 3> clean_px = kPaper;
                std::array<double, 3> thick_px = kPaper;
                if (li >= 0) {
                    const Part& part = spec.parts[static_cast<size_t>(li)];
                    ft.depth.at(x, y) = spec.part_depth(static_cast<size_t>(li));
                    const std::array<double, 3> fill =
                        texture_color(part.texture, cov.local[idx].x, cov.local[idx].y);
                    clean_px = -cov.sdf[idx] <= part.stroke_width ? part.ink : fill;
                    thick_px = -cov.sdf[idx] <= part.stroke_width + 1.0 ? part.ink : fill;
                }
                for (int c = 0; c < 3; ++c) {
                    ft.clean[static_cast<size_t>(c)].at(x, y) = clean_px[static_cast<size_t>(c)];
                    ft.rgb[static_cast<size_t>(c)].at(x, y) = thick_px[static_cast<size_t>(c)];
                }

                if (li >= 0) {
                    bool boundary = false;
                    for (int j = -1; j <= 1 && !boundary; ++j) {
                        for (int i = -1; i <= 1; ++i) {
                            const int nx = x + i, ny = y + j;
                            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                            if (cov.label[static_cast<size_t>(ny) * w + nx] != li) {
                                boundary = true;
                                break;
                            }
                        }
                    }
                    if (boundary) {
                        ft.oracle_edges.set(x, y);
                        if (cov.cover[idx] >= 2) ft.occluded_boundary.set(x, y);
                    }

                    if (fi + 1 < spec.frames) {
                        const Part& part = spec.parts[static_cast<size_t>(li)];
                        const double dtheta = part_angle(part, fi + 1) - part_angle(part, fi);
                        if (dtheta != 0.0) {
                            const Vec2 moved =
                                part.pivot + rotate(rotate(Vec2{x - part.pivot.x, y - part.pivot.y},
                                                           -part_angle(part, fi)),
                                                    part_angle(part, fi + 1));
                            ft.flow_to_next.at(x, y) = {moved.x - x, moved.y - y};
                        }
                    }
                }
            }
        }

        const double area = static_cast<double>(visible_area(cov));
        ft.occlusion_rate = rest_area > 0.0 ? std::max(0.0, 1.0 - area / rest_area) : 0.0;
        ft.occlusion_free = !any_overlap && ft.occlusion_rate == 0.0;

        for (auto& ch : ft.rgb) gaussian_blur_inplace(ch, 1.0);
    }
    return out;
}

double occlusion_rate(const SceneSpec& spec, int frame) {
    validate(spec);
    if (frame < 0 || frame >= spec.frames) {
        throw ParamError("occlusion_rate: frame " + std::to_string(frame) + " out of range");
    }
    const double rest = static_cast<double>(visible_area(cover_frame(spec, 0)));
    if (rest <= 0.0) return 0.0;
    const double area = static_cast<double>(visible_area(cover_frame(spec, frame)));
    return std::max(0.0, 1.0 - area / rest);
}

SceneSpec make_canonical_scene(std::uint64_t seed, int frames, int size, double depth_gap) {
    const double s = size / 256.0;
    auto jitter = [&](int salt, double lo, double hi) {
        if (seed == 0) return 0.5 * (lo + hi);
        return lo + (hi - lo) * hash01(splitmix64(seed), salt, 0);
    };

    SceneSpec spec;
    spec.width = size;
    spec.height = size;
    spec.frames = frames;
    spec.seed = seed;
    spec.base_depth = 5.0;
    spec.depth_gap = depth_gap;

    Part body;
    body.name = "body";
    body.pivot = {jitter(1, 100.0, 110.0) * s, jitter(2, 135.0, 145.0) * s};
    body.shape = CapsuleShape{{0.0, -55.0 * s}, {0.0, 55.0 * s}, 42.0 * s};
    body.depth_rank = 0;
    body.texture.type = TextureSpec::Type::kNoise;
    body.texture.period = 7.0 * s;
    body.texture.noise_seed = splitmix64(seed ^ 0x11ull);
    body.texture.color_lo = {0.62, 0.68, 0.78};
    body.texture.color_hi = {0.85, 0.89, 0.94};
    body.stroke_width = 2.0;

    Part limb;
    limb.name = "limb";
    limb.pivot = {jitter(3, 166.0, 174.0) * s, jitter(4, 136.0, 144.0) * s};
    const double len = jitter(5, 64.0, 72.0) * s;
    limb.shape = CapsuleShape{{8.0 * s, 0.0}, {len, 0.0}, 9.0 * s};
    limb.depth_rank = 1;
    limb.texture.type = TextureSpec::Type::kNoise;
    limb.texture.period = 5.0 * s;
    limb.texture.noise_seed = splitmix64(seed ^ 0x22ull);
    limb.texture.color_lo = {0.55, 0.38, 0.34};
    limb.texture.color_hi = {0.78, 0.58, 0.52};
    limb.stroke_width = 2.0;

    const double start = jitter(6, 72.0, 78.0) * std::numbers::pi / 180.0;
    const double stop = jitter(7, 160.0, 170.0) * std::numbers::pi / 180.0;
    limb.angles.resize(static_cast<size_t>(frames));
    for (int i = 0; i < frames; ++i) {
        limb.angles[static_cast<size_t>(i)] =
            frames > 1 ? start + (stop - start) * i / (frames - 1) : start;
    }

    spec.parts = {body, limb};
    return spec;
}

SceneSpec make_toy_drawing_scene(std::uint64_t seed, int size) {
    SceneSpec spec;
    spec.width = size;
    spec.height = size;
    spec.frames = 1;
    spec.seed = seed;
    spec.base_depth = 5.0;
    spec.depth_gap = 0.5;

    const double s = size / 64.0;

    Part body;
    body.name = "body";
    body.pivot = {30.0 * s, 34.0 * s};
    body.shape = CapsuleShape{{0.0, -14.0 * s}, {0.0, 12.0 * s}, 11.0 * s};
    body.depth_rank = 0;
    body.texture.type = TextureSpec::Type::kNoise;
    body.texture.period = 4.0 * s;
    body.texture.noise_seed = splitmix64(seed ^ 0x33ull);
    body.texture.color_lo = {0.35, 0.45, 0.62};
    body.texture.color_hi = {0.72, 0.78, 0.88};
    body.stroke_width = 2.0;

    Part limb;
    limb.name = "limb";
    limb.pivot = {38.0 * s, 22.0 * s};
    limb.shape = CapsuleShape{{0.0, 0.0}, {16.0 * s, 0.0}, 4.5 * s};
    limb.depth_rank = 1;
    limb.texture.type = TextureSpec::Type::kStripes;
    limb.texture.period = 5.0 * s;
    limb.texture.angle = 1.1;
    limb.texture.color_lo = {0.62, 0.42, 0.32};
    limb.texture.color_hi = {0.92, 0.72, 0.55};
    limb.stroke_width = 2.0;
    limb.angles = {0.9};

    spec.parts = {body, limb};
    return spec;
}

}  // namespace fded
