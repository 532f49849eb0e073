#include "mefgen/iqa.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mefgen {

namespace {

constexpr int kWindow = 7;
constexpr double kKernelSigma = 7.0 / 6.0;

const std::array<double, kWindow>& gaussian_kernel() {
    static const std::array<double, kWindow> kernel = [] {
        std::array<double, kWindow> k{};
        double sum = 0.0;
        for (int i = 0; i < kWindow; ++i) {
            const double d = i - kWindow / 2;
            k[i] = std::exp(-d * d / (2.0 * kKernelSigma * kKernelSigma));
            sum += k[i];
        }
        for (double& v : k) {
            v /= sum;
        }
        // pin the center tap so the taps sum to exactly 1 and constants
        // pass through the blur unchanged
        double rest = 0.0;
        for (int i = 0; i < kWindow; ++i) {
            if (i != kWindow / 2) rest += k[i];
        }
        k[kWindow / 2] = 1.0 - rest;
        return k;
    }();
    return kernel;
}

// double accumulation keeps the sigma field clean near zero
std::vector<double> blur7(const std::vector<double>& img, int w, int h) {
    const auto& kernel = gaussian_kernel();
    std::vector<double> tmp(img.size()), out(img.size());
    for (int y = 0; y < h; ++y) {
        const double* row = img.data() + static_cast<std::size_t>(y) * w;
        double* trow = tmp.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += kernel[k] * row[std::clamp(x + k - kWindow / 2, 0, w - 1)];
            }
            trow[x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                const int yy = std::clamp(y + k - kWindow / 2, 0, h - 1);
                acc += kernel[k] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            orow[x] = acc;
        }
    }
    return out;
}

}  // namespace

MscnResult mscn_with_sigma(const GrayImage& img) {
    validate(img);
    if (std::min(img.width, img.height) < 16) {
        throw IqaError("image too small for MSCN (min dim 16)");
    }
    std::vector<double> values(img.data.begin(), img.data.end());
    std::vector<double> squared(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        squared[i] = values[i] * values[i];
    }
    const std::vector<double> mu = blur7(values, img.width, img.height);
    const std::vector<double> mu_of_sq = blur7(squared, img.width, img.height);

    MscnResult result;
    result.coefficients = GrayImage(img.width, img.height);
    result.sigma = GrayImage(img.width, img.height);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double variance = std::max(0.0, mu_of_sq[i] - mu[i] * mu[i]);
        const double sigma = std::sqrt(variance);
        result.sigma.data[i] = static_cast<float>(sigma);
        result.coefficients.data[i] = static_cast<float>((values[i] - mu[i]) / (sigma + 1.0));
    }
    return result;
}

GrayImage mscn(const GrayImage& img) {
    return mscn_with_sigma(img).coefficients;
}

}  // namespace mefgen
