#pragma once

// Static raster output for heatmaps, piano rolls and confusion matrices.

#include "geopitch/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace geopitch {

/// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Maps a matrix to gray levels; with dark_is_high the largest value is black. Matrix row 0 lands at the bottom so pitch rises
/// upwards. Each cell becomes a `scale` x `scale` block.
GrayImage matrix_to_image(const Matrix& m, int scale = 4, bool dark_is_high = true);

/// Binary PPM (P6) with equal RGB channels.
std::vector<std::uint8_t> encode_ppm(const GrayImage& img);
/// 8-bit grayscale PNG.
std::vector<std::uint8_t> encode_png(const GrayImage& img);

/// Format chosen by extension: .png, otherwise PPM. Throws IoError.
void write_image(const std::filesystem::path& path, const GrayImage& img);

}  // namespace geopitch
