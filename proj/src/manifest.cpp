#include "fded/manifest.hpp"

#include "fded/io_formats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

namespace fded {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

json parse_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw FormatError(origin + ": invalid JSON");
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open for reading");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw FormatError(path.string() + ": write failed");
}

Vec2 vec2_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

TextureSpec texture_from(const json& j, const std::string& where) {
    check_keys(j, {"type", "period", "phase", "angle", "color_lo", "color_hi", "noise_seed"},
               where);
    TextureSpec t;
    const std::string type = j.value("type", "noise");
    if (type == "stripes") {
        t.type = TextureSpec::Type::kStripes;
    } else if (type == "noise") {
        t.type = TextureSpec::Type::kNoise;
    } else {
        throw ConfigError(where + ": unknown texture type '" + type + "'");
    }
    t.period = j.value("period", t.period);
    t.phase = j.value("phase", t.phase);
    t.angle = j.value("angle", t.angle);
    t.noise_seed = j.value("noise_seed", t.noise_seed);
    for (int c = 0; c < 3; ++c) {
        if (j.contains("color_lo")) t.color_lo[c] = j["color_lo"].at(c).get<double>();
        if (j.contains("color_hi")) t.color_hi[c] = j["color_hi"].at(c).get<double>();
    }
    return t;
}

json texture_to(const TextureSpec& t) {
    json j;
    j["type"] = t.type == TextureSpec::Type::kStripes ? "stripes" : "noise";
    j["period"] = t.period;
    j["phase"] = t.phase;
    j["angle"] = t.angle;
    j["color_lo"] = t.color_lo;
    j["color_hi"] = t.color_hi;
    j["noise_seed"] = t.noise_seed;
    return j;
}

Part part_from(const json& j, const std::string& where) {
    check_keys(j,
               {"name", "shape", "pivot", "depth", "depth_rank", "texture", "stroke_width",
                "angles_deg"},
               where);
    Part p;
    p.name = j.value("name", "");
    if (!j.contains("shape")) throw ConfigError(where + ": missing shape");
    const json& s = j["shape"];
    check_keys(s, {"type", "p0", "p1", "radius", "vertices"}, where + ".shape");
    const std::string type = s.value("type", "");
    if (type == "capsule") {
        CapsuleShape cap;
        cap.p0 = vec2_from(s.at("p0"), where + ".shape.p0");
        cap.p1 = vec2_from(s.at("p1"), where + ".shape.p1");
        cap.radius = s.at("radius").get<double>();
        p.shape = cap;
    } else if (type == "polygon") {
        PolygonShape poly;
        for (const json& v : s.at("vertices")) {
            poly.vertices.push_back(vec2_from(v, where + ".shape.vertices"));
        }
        p.shape = poly;
    } else {
        throw ConfigError(where + ".shape: unknown type '" + type + "'");
    }
    p.pivot = vec2_from(j.at("pivot"), where + ".pivot");
    if (j.contains("depth")) p.depth = j["depth"].get<double>();
    p.depth_rank = j.value("depth_rank", 0);
    if (j.contains("texture")) p.texture = texture_from(j["texture"], where + ".texture");
    p.stroke_width = j.value("stroke_width", p.stroke_width);
    if (j.contains("angles_deg")) {
        for (const json& a : j["angles_deg"]) {
            p.angles.push_back(a.get<double>() * 3.14159265358979323846 / 180.0);
        }
    }
    return p;
}

json part_to(const Part& p) {
    json j;
    j["name"] = p.name;
    if (const auto* cap = std::get_if<CapsuleShape>(&p.shape)) {
        j["shape"] = {{"type", "capsule"},
                      {"p0", {cap->p0.x, cap->p0.y}},
                      {"p1", {cap->p1.x, cap->p1.y}},
                      {"radius", cap->radius}};
    } else {
        const auto& poly = std::get<PolygonShape>(p.shape);
        json verts = json::array();
        for (const Vec2& v : poly.vertices) verts.push_back({v.x, v.y});
        j["shape"] = {{"type", "polygon"}, {"vertices", verts}};
    }
    j["pivot"] = {p.pivot.x, p.pivot.y};
    if (p.depth) j["depth"] = *p.depth;
    j["depth_rank"] = p.depth_rank;
    j["texture"] = texture_to(p.texture);
    j["stroke_width"] = p.stroke_width;
    if (!p.angles.empty()) {
        json angles = json::array();
        for (double a : p.angles) angles.push_back(a * 180.0 / 3.14159265358979323846);
        j["angles_deg"] = angles;
    }
    return j;
}

std::string frame_file(int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%04d_%s", index, suffix);
    return buf;
}

void require_exists(const std::filesystem::path& dir, const std::string& name) {
    if (name.empty()) return;
    if (!std::filesystem::exists(dir / name)) {
        throw ConfigError("manifest references missing file '" + name + "'");
    }
}

}  // namespace

SceneSpec scene_from_json_text(const std::string& text, const std::string& origin) {
    const json j = parse_text(text, origin);
    check_keys(j,
               {"version", "width", "height", "frames", "seed", "base_depth", "depth_gap",
                "parts"},
               origin);
    SceneSpec spec;
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.frames = j.value("frames", spec.frames);
    spec.seed = j.value("seed", spec.seed);
    spec.base_depth = j.value("base_depth", spec.base_depth);
    spec.depth_gap = j.value("depth_gap", spec.depth_gap);
    if (!j.contains("parts")) throw ConfigError(origin + ": missing parts");
    int idx = 0;
    for (const json& pj : j["parts"]) {
        spec.parts.push_back(part_from(pj, origin + ".parts[" + std::to_string(idx) + "]"));
        ++idx;
    }
    return spec;
}

std::string scene_to_json_text(const SceneSpec& spec) {
    json j;
    j["version"] = "fded-scene/1";
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["frames"] = spec.frames;
    j["seed"] = spec.seed;
    j["base_depth"] = spec.base_depth;
    j["depth_gap"] = spec.depth_gap;
    json parts = json::array();
    for (const Part& p : spec.parts) parts.push_back(part_to(p));
    j["parts"] = parts;
    return j.dump(2) + "\n";
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    return scene_from_json_text(read_file(path), path.string());
}

SequenceManifest save_sequence(const std::filesystem::path& dir, const SceneSpec& spec,
                               const std::vector<FrameTruth>& truths) {
    std::filesystem::create_directories(dir);
    SequenceManifest manifest;
    manifest.width = spec.width;
    manifest.height = spec.height;
    manifest.background_sentinel = scene_background_sentinel(spec);
    manifest.generator_echo = scene_to_json_text(spec);

    const int n = static_cast<int>(truths.size());
    for (int i = 0; i < n; ++i) {
        const FrameTruth& ft = truths[static_cast<size_t>(i)];
        FrameEntry entry;
        entry.index = i;
        entry.rgb = frame_file(i, "rgb.ppm");
        entry.clean = frame_file(i, "clean.ppm");
        entry.depth = frame_file(i, "depth.pfm");
        entry.oracle_edges = frame_file(i, "oracle.pgm");
        entry.occluded_boundary = frame_file(i, "occb.pgm");
        entry.occlusion_free = ft.occlusion_free;
        entry.occlusion_rate = ft.occlusion_rate;
        write_rgb(dir / entry.rgb, ft.rgb);
        write_rgb(dir / entry.clean, ft.clean);
        write_float_grid(dir / entry.depth, ft.depth);
        write_edge_map(dir / entry.oracle_edges, ft.oracle_edges);
        write_edge_map(dir / entry.occluded_boundary, ft.occluded_boundary);
        if (i + 1 < n) {
            entry.flow_oracle = frame_file(i, "flow.flo");
            write_flow(dir / entry.flow_oracle, ft.flow_to_next);
        }
        manifest.frames.push_back(std::move(entry));
    }

    json j;
    j["version"] = manifest.version;
    j["width"] = manifest.width;
    j["height"] = manifest.height;
    j["background_sentinel"] = manifest.background_sentinel;
    j["generator"] = json::parse(manifest.generator_echo);
    json frames = json::array();
    for (const FrameEntry& e : manifest.frames) {
        json fj;
        fj["index"] = e.index;
        fj["rgb"] = e.rgb;
        fj["clean"] = e.clean;
        fj["depth"] = e.depth;
        fj["oracle_edges"] = e.oracle_edges;
        fj["occluded_boundary"] = e.occluded_boundary;
        if (!e.flow_oracle.empty()) fj["flow_oracle"] = e.flow_oracle;
        fj["occlusion_free"] = e.occlusion_free;
        fj["occlusion_rate"] = e.occlusion_rate;
        frames.push_back(fj);
    }
    j["frames"] = frames;
    write_file(dir / "manifest.json", j.dump(2) + "\n");
    return manifest;
}

SequenceManifest load_manifest(const std::filesystem::path& dir) {
    const std::filesystem::path path = dir / "manifest.json";
    const json j = parse_text(read_file(path), path.string());
    check_keys(j, {"version", "width", "height", "background_sentinel", "generator", "frames"},
               path.string());

    SequenceManifest m;
    m.version = j.value("version", "");
    if (m.version != kManifestVersion) {
        throw ConfigError(path.string() + ": unsupported version '" + m.version + "'");
    }
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.background_sentinel = j.at("background_sentinel").get<double>();
    if (j.contains("generator")) m.generator_echo = j["generator"].dump(2);

    if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
        throw ConfigError(path.string() + ": frames missing or empty");
    }
    int expect = 0;
    for (const json& fj : j["frames"]) {
        check_keys(fj,
                   {"index", "rgb", "clean", "depth", "oracle_edges", "occluded_boundary",
                    "flow_oracle", "flow_external", "occlusion_free", "occlusion_rate"},
                   path.string() + " frame " + std::to_string(expect));
        FrameEntry e;
        e.index = fj.at("index").get<int>();
        if (e.index != expect) {
            throw ConfigError(path.string() + ": frame indices not contiguous at " +
                              std::to_string(e.index));
        }
        ++expect;
        e.rgb = fj.at("rgb").get<std::string>();
        e.depth = fj.at("depth").get<std::string>();
        e.clean = fj.value("clean", "");
        e.oracle_edges = fj.value("oracle_edges", "");
        e.occluded_boundary = fj.value("occluded_boundary", "");
        e.flow_oracle = fj.value("flow_oracle", "");
        e.flow_external = fj.value("flow_external", "");
        e.occlusion_free = fj.at("occlusion_free").get<bool>();
        e.occlusion_rate = fj.value("occlusion_rate", 0.0);
        for (const std::string& name :
             {e.rgb, e.depth, e.clean, e.oracle_edges, e.occluded_boundary, e.flow_oracle,
              e.flow_external}) {
            require_exists(dir, name);
        }
        m.frames.push_back(std::move(e));
    }
    return m;
}

std::vector<FrameRecord> load_frame_records(const std::filesystem::path& dir,
                                            const SequenceManifest& manifest) {
    std::vector<FrameRecord> records;
    records.reserve(manifest.frames.size());
    for (const FrameEntry& e : manifest.frames) {
        FrameRecord r;
        r.index = e.index;
        r.rgb = read_rgb(dir / e.rgb);
        r.depth = read_float_grid(dir / e.depth);
        r.occlusion_free = e.occlusion_free;
        if (!e.flow_external.empty()) {
            r.external_flow = read_flow(dir / e.flow_external);
        }
        require_same_shape(manifest.width, manifest.height, r.depth.width, r.depth.height,
                           "frame " + std::to_string(e.index) + " depth");
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace fded
