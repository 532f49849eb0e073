#pragma once

#include "mefgen/image.hpp"

#include <filesystem>

namespace mefgen {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Load an RGB PNG into linear light. 8-bit files are decoded through the
// sRGB curve; 16-bit files are treated as linear after division by 65535.
// Anything else (grayscale, palette, alpha, other depths) is an error.
LinearImage load_image(const std::filesystem::path& path);

// Load an 8-bit RGB PNG without decoding.
SrgbImage load_srgb(const std::filesystem::path& path);

// Write an 8-bit RGB PNG. Bit-exact round-trip with load_srgb.
void save_image(const std::filesystem::path& path, const SrgbImage& img);

// Write a 16-bit RGB PNG: values clamped to [0,1] and quantized by
// round(v * 65535). Round-trips exactly for values on the 16-bit lattice.
void save_image(const std::filesystem::path& path, const LinearImage& img);

}  // namespace mefgen
