#pragma once

#include "mefgen/image.hpp"

namespace mefgen {

enum class PyramidKind { gaussian, laplacian };

struct PyramidError : std::runtime_error {
    explicit PyramidError(const std::string& what) : std::runtime_error(what) {}
};

// Multi-scale decomposition of a single float plane. Level 0 is full
// resolution; each subsequent level is half-rounded-up in each dimension.
// A laplacian pyramid's last level equals the gaussian pyramid's last level.
struct Pyramid {
    PyramidKind kind = PyramidKind::gaussian;
    std::vector<GrayImage> levels;
};

// floor(log2(min(w,h))) - 1, clamped to >= 1.
int default_pyramid_depth(int width, int height);

// Repeated 5-tap binomial blur ([1,4,6,4,1]/16, edge-clamped) followed by 2x
// decimation. Throws "depth exceeds image size" when
// min(w,h) / 2^(depth-1) < 1.
Pyramid gaussian_pyramid(const GrayImage& img, int depth);

// Level k = gaussian k - upsample(gaussian k+1); final level is the coarsest
// gaussian. Upsampling zero-inserts, blurs with 4x gain, and crops to the
// finer level's exact dimensions, so odd sizes round-trip.
Pyramid laplacian_pyramid(const GrayImage& img, int depth);

// Upsample-and-add from coarsest to finest. Only valid on laplacian pyramids.
GrayImage collapse(const Pyramid& pyr);

// Building blocks, exposed for the fusion blend loop.
GrayImage pyr_blur(const GrayImage& img);
GrayImage pyr_downsample(const GrayImage& img);
GrayImage pyr_upsample(const GrayImage& img, int target_width, int target_height);

}  // namespace mefgen
