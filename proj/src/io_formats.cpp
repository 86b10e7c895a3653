#include "fded/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace fded {

namespace {

constexpr float kFlowMagic = 202021.25f;

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::istream& in,
                             const std::string& why) {
    const auto off = in.tellg();
    throw FormatError(path.string() + ": " + why + " (byte offset " +
                      std::to_string(off < 0 ? -1 : static_cast<long long>(off)) + ")");
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open for reading");
    return in;
}

// Netpbm token reader: skips whitespace and '#' comments.
std::string next_token(const std::filesystem::path& path, std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (tok.empty()) parse_fail(path, in, "unexpected end of header");
    return tok;
}

int parse_positive(const std::filesystem::path& path, std::istream& in, const char* what) {
    const std::string tok = next_token(path, in);
    try {
        const int v = std::stoi(tok);
        if (v <= 0) throw std::invalid_argument("non-positive");
        return v;
    } catch (const std::exception&) {
        parse_fail(path, in, std::string("bad ") + what + " '" + tok + "'");
    }
}

std::pair<int, int> read_netpbm_header(const std::filesystem::path& path, std::istream& in,
                                       const char* magic) {
    const std::string m = next_token(path, in);
    if (m != magic) parse_fail(path, in, std::string("expected ") + magic + ", got '" + m + "'");
    const int w = parse_positive(path, in, "width");
    const int h = parse_positive(path, in, "height");
    const int maxval = parse_positive(path, in, "maxval");
    if (maxval != 255) parse_fail(path, in, "maxval must be 255");
    return {w, h};
}

void read_payload(const std::filesystem::path& path, std::istream& in, char* dst, size_t bytes) {
    in.read(dst, static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in.gcount()) != bytes) {
        parse_fail(path, in, "truncated payload, expected " + std::to_string(bytes) + " bytes");
    }
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

template <typename BitRaster>
void write_graymap(const std::filesystem::path& path, const BitRaster& e) {
    std::ofstream out = open_out(path);
    out << "P5\n" << e.width << " " << e.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(e.width));
    for (int y = 0; y < e.height; ++y) {
        for (int x = 0; x < e.width; ++x) row[static_cast<size_t>(x)] = e.test(x, y) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()), e.width);
    }
    if (!out) throw FormatError(path.string() + ": write failed");
}

template <typename BitRaster>
BitRaster read_graymap(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const auto [w, h] = read_netpbm_header(path, in, "P5");
    BitRaster e(w, h);
    std::vector<std::uint8_t> row(static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        read_payload(path, in, reinterpret_cast<char*>(row.data()), row.size());
        for (int x = 0; x < w; ++x) e.set(x, y, row[static_cast<size_t>(x)] != 0);
    }
    return e;
}

}  // namespace

void write_edge_map(const std::filesystem::path& path, const EdgeMap& e) {
    write_graymap(path, e);
}

EdgeMap read_edge_map(const std::filesystem::path& path) { return read_graymap<EdgeMap>(path); }

void write_mask(const std::filesystem::path& path, const BinaryMask& m) { write_graymap(path, m); }

BinaryMask read_mask(const std::filesystem::path& path) { return read_graymap<BinaryMask>(path); }

void write_float_grid(const std::filesystem::path& path, const ScalarGrid& g) {
    std::ofstream out = open_out(path);
    out << "Pf\n" << g.width << " " << g.height << "\n-1.0\n";
    std::vector<float> row(static_cast<size_t>(g.width));
    for (int y = g.height - 1; y >= 0; --y) {
        for (int x = 0; x < g.width; ++x) row[static_cast<size_t>(x)] = static_cast<float>(g.at(x, y));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw FormatError(path.string() + ": write failed");
}

ScalarGrid read_float_grid(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const std::string magic = next_token(path, in);
    if (magic != "Pf") parse_fail(path, in, "expected Pf, got '" + magic + "'");
    const int w = parse_positive(path, in, "width");
    const int h = parse_positive(path, in, "height");
    const std::string scale_tok = next_token(path, in);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        parse_fail(path, in, "bad scale '" + scale_tok + "'");
    }
    if (scale >= 0.0) parse_fail(path, in, "big-endian float maps are not supported");

    ScalarGrid g(w, h);
    std::vector<float> row(static_cast<size_t>(w));
    for (int y = h - 1; y >= 0; --y) {
        read_payload(path, in, reinterpret_cast<char*>(row.data()), row.size() * 4);
        for (int x = 0; x < w; ++x) g.at(x, y) = row[static_cast<size_t>(x)];
    }
    const double inv = 1.0 / -scale;
    if (inv != 1.0) {
        for (double& v : g.values) v *= inv;
    }
    return g;
}

void write_rgb(const std::filesystem::path& path, const std::array<ScalarGrid, 3>& rgb) {
    require_same_shape(rgb[0].width, rgb[0].height, rgb[1].width, rgb[1].height, "write_rgb");
    require_same_shape(rgb[0].width, rgb[0].height, rgb[2].width, rgb[2].height, "write_rgb");
    std::ofstream out = open_out(path);
    out << "P6\n" << rgb[0].width << " " << rgb[0].height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(rgb[0].width) * 3);
    for (int y = 0; y < rgb[0].height; ++y) {
        for (int x = 0; x < rgb[0].width; ++x) {
            row[static_cast<size_t>(x) * 3 + 0] = quantize(rgb[0].at(x, y));
            row[static_cast<size_t>(x) * 3 + 1] = quantize(rgb[1].at(x, y));
            row[static_cast<size_t>(x) * 3 + 2] = quantize(rgb[2].at(x, y));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw FormatError(path.string() + ": write failed");
}

std::array<ScalarGrid, 3> read_rgb(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const auto [w, h] = read_netpbm_header(path, in, "P6");
    std::array<ScalarGrid, 3> rgb{ScalarGrid(w, h), ScalarGrid(w, h), ScalarGrid(w, h)};
    std::vector<std::uint8_t> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        read_payload(path, in, reinterpret_cast<char*>(row.data()), row.size());
        for (int x = 0; x < w; ++x) {
            rgb[0].at(x, y) = row[static_cast<size_t>(x) * 3 + 0] / 255.0;
            rgb[1].at(x, y) = row[static_cast<size_t>(x) * 3 + 1] / 255.0;
            rgb[2].at(x, y) = row[static_cast<size_t>(x) * 3 + 2] / 255.0;
        }
    }
    return rgb;
}

void write_flow(const std::filesystem::path& path, const FlowField& v) {
    std::ofstream out = open_out(path);
    out.write(reinterpret_cast<const char*>(&kFlowMagic), 4);
    const std::int32_t w = v.width, h = v.height;
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    std::vector<float> row(static_cast<size_t>(v.width) * 2);
    for (int y = 0; y < v.height; ++y) {
        for (int x = 0; x < v.width; ++x) {
            row[static_cast<size_t>(x) * 2 + 0] = static_cast<float>(v.at(x, y).x);
            row[static_cast<size_t>(x) * 2 + 1] = static_cast<float>(v.at(x, y).y);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw FormatError(path.string() + ": write failed");
}

FlowField read_flow(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    float magic = 0.0f;
    read_payload(path, in, reinterpret_cast<char*>(&magic), 4);
    if (magic != kFlowMagic) {
        parse_fail(path, in, "wrong flow magic " + std::to_string(magic));
    }
    std::int32_t w = 0, h = 0;
    read_payload(path, in, reinterpret_cast<char*>(&w), 4);
    read_payload(path, in, reinterpret_cast<char*>(&h), 4);
    if (w <= 0 || h <= 0) parse_fail(path, in, "bad flow dimensions");
    FlowField v(w, h);
    std::vector<float> row(static_cast<size_t>(w) * 2);
    for (int y = 0; y < h; ++y) {
        read_payload(path, in, reinterpret_cast<char*>(row.data()), row.size() * 4);
        for (int x = 0; x < w; ++x) {
            v.at(x, y) = {row[static_cast<size_t>(x) * 2 + 0], row[static_cast<size_t>(x) * 2 + 1]};
        }
    }
    return v;
}

}  // namespace fded
