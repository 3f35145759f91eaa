#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace anmin {

/// 8-bit single-channel image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
    std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Reads binary or ASCII PGM, or PNG (colour PNGs are converted to gray).
GrayImage read_image(const std::filesystem::path& path);

void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace anmin
