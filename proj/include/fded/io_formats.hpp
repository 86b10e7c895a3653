#pragma once

#include "fded/raster.hpp"

#include <array>
#include <filesystem>

namespace fded {

// Binary graymap (P5, maxval 255): 0 = clear, 255 = set.
void write_edge_map(const std::filesystem::path& path, const EdgeMap& e);
EdgeMap read_edge_map(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const BinaryMask& m);
BinaryMask read_mask(const std::filesystem::path& path);

// Grayscale portable float map (Pf, scale -1.0 = little-endian), float32
// payload, rows bottom-to-top per the format.
void write_float_grid(const std::filesystem::path& path, const ScalarGrid& g);
ScalarGrid read_float_grid(const std::filesystem::path& path);

// Binary pixmap (P6, maxval 255); [0,1] values quantized to 8 bits.
void write_rgb(const std::filesystem::path& path, const std::array<ScalarGrid, 3>& rgb);
std::array<ScalarGrid, 3> read_rgb(const std::filesystem::path& path);

// Flow interchange: magic float 202021.25, int32 width/height, then row-major
// interleaved (dx, dy) float32 pairs, little-endian.
void write_flow(const std::filesystem::path& path, const FlowField& v);
FlowField read_flow(const std::filesystem::path& path);

}  // namespace fded
