#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cofkit/image.hpp"

namespace cofkit {

/// Reads an 8-bit PNG (gray, gray+alpha, RGB, RGBA) or binary PPM/PGM.
/// Gray inputs are replicated to three channels; alpha is discarded.
ColorImage load_image(const std::string& path);

/// Decodes an in-memory PNG. Throws ImageTooLarge when the header reports
/// more than `max_pixels` pixels (0 disables the check).
ColorImage decode_png(const std::vector<std::uint8_t>& bytes, std::size_t max_pixels = 0);

/// 8-bit PNG encoding with level = round(sample * 255).
std::vector<std::uint8_t> encode_png(const ColorImage& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);

void save_image(const ColorImage& img, const std::string& path);
void save_image(const GrayImage& img, const std::string& path);

/// White pixels are inside; anything with gray level < 128 is outside.
RegionMask load_mask(const std::string& path);
void save_mask(const RegionMask& mask, const std::string& path);

}  // namespace cofkit
