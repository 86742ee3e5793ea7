#pragma once

#include <cstdint>
#include <filesystem>

#include "handpose/image.hpp"

namespace handpose {

// Binary PGM (P5). Depth maps are 16-bit big-endian millimeters (maxval
// 65535, 0 = no data); masks are 8-bit with 255 = hand, 0 = background.
// Read failures throw IoError naming the file and the offending field.

void write_depth_pgm(const std::filesystem::path& path, const DepthImage& depth);
DepthImage read_depth_pgm(const std::filesystem::path& path);

void write_mask_pgm(const std::filesystem::path& path, const SilhouetteMask& mask);
SilhouetteMask read_mask_pgm(const std::filesystem::path& path);

/// Plain 8-bit grayscale, written verbatim.
void write_gray_pgm(const std::filesystem::path& path, const Image<std::uint8_t>& image);

}  // namespace handpose
