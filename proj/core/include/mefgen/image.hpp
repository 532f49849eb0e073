#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mefgen {

// Linear-light RGB raster, 32-bit float per channel, values in [0, +inf).
// The working representation for everything HDR.
struct LinearImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // row-major, interleaved r,g,b

    LinearImage() = default;
    LinearImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0.0f) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    float& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

// 8-bit sRGB-encoded RGB raster.
struct SrgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, interleaved r,g,b

    SrgbImage() = default;
    SrgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool operator==(const SrgbImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

// Single-channel float raster. Luminance outputs live in [0,1]; weight maps
// and pyramid levels reuse the type without that range constraint.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

struct ImageError : std::runtime_error {
    explicit ImageError(const std::string& what) : std::runtime_error(what) {}
};

// Invariant checks: dimensions positive, buffer length matches, linear values
// finite and non-negative. Throw ImageError on violation.
void validate(const LinearImage& img);
void validate(const SrgbImage& img);
void validate(const GrayImage& img);

}  // namespace mefgen
