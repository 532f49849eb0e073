#include "mefgen/pyramid.hpp"

#include <algorithm>
#include <cmath>

namespace mefgen {

namespace {

constexpr float kKernel[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};

inline int clamp_index(int i, int n) {
    return std::clamp(i, 0, n - 1);
}

// Separable 5-tap convolution with clamp-to-edge padding and a per-axis gain.
GrayImage convolve5(const GrayImage& img, float gain) {
    const int w = img.width, h = img.height;
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        const float* row = img.data.data() + static_cast<std::size_t>(y) * w;
        float* out = tmp.data.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int k = -2; k <= 2; ++k) {
                acc += kKernel[k + 2] * row[clamp_index(x + k, w)];
            }
            out[x] = acc * gain;
        }
    }
    GrayImage dst(w, h);
    for (int y = 0; y < h; ++y) {
        float* out = dst.data.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int k = -2; k <= 2; ++k) {
                acc += kKernel[k + 2] * tmp.at(x, clamp_index(y + k, h));
            }
            out[x] = acc * gain;
        }
    }
    return dst;
}

void check_depth(const GrayImage& img, int depth) {
    validate(img);
    if (depth < 1) {
        throw PyramidError("pyramid depth must be >= 1");
    }
    const int min_dim = std::min(img.width, img.height);
    // min(w,h) / 2^(depth-1) must stay >= 1
    if (depth > 1 && (min_dim >> (depth - 1)) < 1) {
        throw PyramidError("depth exceeds image size");
    }
}

}  // namespace

int default_pyramid_depth(int width, int height) {
    const int min_dim = std::min(width, height);
    int d = static_cast<int>(std::floor(std::log2(static_cast<double>(min_dim)))) - 1;
    return std::max(d, 1);
}

GrayImage pyr_blur(const GrayImage& img) {
    return convolve5(img, 1.0f);
}

GrayImage pyr_downsample(const GrayImage& img) {
    GrayImage blurred = convolve5(img, 1.0f);
    const int ow = (img.width + 1) / 2;
    const int oh = (img.height + 1) / 2;
    GrayImage out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            out.at(x, y) = blurred.at(2 * x, 2 * y);
        }
    }
    return out;
}

GrayImage pyr_upsample(const GrayImage& img, int target_width, int target_height) {
    if ((target_width + 1) / 2 != img.width || (target_height + 1) / 2 != img.height) {
        throw PyramidError("upsample target dimensions do not match source level");
    }
    GrayImage canvas(target_width, target_height, 0.0f);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            canvas.at(2 * x, 2 * y) = img.at(x, y);
        }
    }
    // zero-inserted grid halves the DC per axis; gain 2 per pass restores it
    return convolve5(canvas, 2.0f);
}

Pyramid gaussian_pyramid(const GrayImage& img, int depth) {
    check_depth(img, depth);
    Pyramid pyr;
    pyr.kind = PyramidKind::gaussian;
    pyr.levels.reserve(depth);
    pyr.levels.push_back(img);
    for (int k = 1; k < depth; ++k) {
        pyr.levels.push_back(pyr_downsample(pyr.levels.back()));
    }
    return pyr;
}

Pyramid laplacian_pyramid(const GrayImage& img, int depth) {
    Pyramid gauss = gaussian_pyramid(img, depth);
    Pyramid pyr;
    pyr.kind = PyramidKind::laplacian;
    pyr.levels.reserve(depth);
    for (int k = 0; k + 1 < depth; ++k) {
        const GrayImage& fine = gauss.levels[k];
        GrayImage up = pyr_upsample(gauss.levels[k + 1], fine.width, fine.height);
        GrayImage diff(fine.width, fine.height);
        for (std::size_t i = 0; i < diff.data.size(); ++i) {
            diff.data[i] = fine.data[i] - up.data[i];
        }
        pyr.levels.push_back(std::move(diff));
    }
    pyr.levels.push_back(std::move(gauss.levels.back()));
    return pyr;
}

GrayImage collapse(const Pyramid& pyr) {
    if (pyr.kind != PyramidKind::laplacian) {
        throw PyramidError("cannot collapse gaussian pyramid");
    }
    if (pyr.levels.empty()) {
        throw PyramidError("cannot collapse empty pyramid");
    }
    GrayImage acc = pyr.levels.back();
    for (int k = static_cast<int>(pyr.levels.size()) - 2; k >= 0; --k) {
        const GrayImage& level = pyr.levels[k];
        GrayImage up = pyr_upsample(acc, level.width, level.height);
        for (std::size_t i = 0; i < up.data.size(); ++i) {
            up.data[i] += level.data[i];
        }
        acc = std::move(up);
    }
    return acc;
}

}  // namespace mefgen
