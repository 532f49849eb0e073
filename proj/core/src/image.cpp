#include "mefgen/image.hpp"

#include <cmath>

namespace mefgen {

namespace {

void check_dims(int width, int height, std::size_t len, std::size_t channels) {
    if (width <= 0 || height <= 0) {
        throw ImageError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
    const std::size_t expect = static_cast<std::size_t>(width) * height * channels;
    if (len != expect) {
        throw ImageError("image buffer length " + std::to_string(len) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height) + "x" + std::to_string(channels));
    }
}

}  // namespace

void validate(const LinearImage& img) {
    check_dims(img.width, img.height, img.data.size(), 3);
    for (float v : img.data) {
        if (!std::isfinite(v) || v < 0.0f) {
            throw ImageError("linear image values must be finite and >= 0");
        }
    }
}

void validate(const SrgbImage& img) {
    check_dims(img.width, img.height, img.data.size(), 3);
}

void validate(const GrayImage& img) {
    check_dims(img.width, img.height, img.data.size(), 1);
    for (float v : img.data) {
        if (!std::isfinite(v)) {
            throw ImageError("gray image values must be finite");
        }
    }
}

}  // namespace mefgen
