#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otx/image.hpp"

namespace otx::io {

// Reads one netpbm frame (P2/P3/P5/P6, maxval <= 255) from a stream.
// Returns nullopt on clean EOF; throws io_error on malformed data.
// Grayscale inputs are expanded to RGB.
std::optional<ColorImage> read_netpbm(std::istream& in, const std::string& name = "<stream>");

// Reads a frame by path; dispatches on extension (.ppm/.pgm/.pnm/.png).
ColorImage read_image(const std::filesystem::path& path);

void write_ppm(const std::filesystem::path& path, const ColorImage& img);

// 8-bit PGM from bytes.
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& gray);

// Values clamped to [0,1], scaled by 255 and rounded.
void write_pgm_scaled(const std::filesystem::path& path, int width, int height,
                      const std::vector<float>& values);

ColorImage read_pgm_as_color(const std::filesystem::path& path);
std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path, int& width, int& height);

bool png_supported();
ColorImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ColorImage& img);

}  // namespace otx::io
