#include "mefgen/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mefgen {

namespace {

constexpr double kSrgbLinearThreshold = 0.0031308;
constexpr double kSrgbEncodedThreshold = 0.04045;

// decode table for all 256 codes, built once
const std::array<float, 256>& decode_table() {
    static const std::array<float, 256> table = [] {
        std::array<float, 256> t{};
        for (int c = 0; c < 256; ++c) {
            t[c] = static_cast<float>(srgb_eotf(c / 255.0));
        }
        return t;
    }();
    return table;
}

// cell lower edges in linear space: code(v) >= k iff v >= eotf((k-0.5)/255)
const std::array<double, 255>& encode_thresholds() {
    static const std::array<double, 255> thresholds = [] {
        std::array<double, 255> t{};
        for (int k = 1; k <= 255; ++k) {
            t[k - 1] = srgb_eotf((k - 0.5) / 255.0);
        }
        return t;
    }();
    return thresholds;
}

// Binned lookup replacing the per-pixel pow with identical rounding. 4096
// power-of-two bins: v * 4096 is exact in double, and the smallest threshold
// spacing (1/(255 * 12.92) = 3.03e-4 on the linear segment) exceeds the bin
// width, so each bin holds at most one code boundary.
constexpr int kEncodeBins = 4096;

struct EncodeTable {
    std::array<std::uint8_t, kEncodeBins> base{};
    std::array<double, kEncodeBins> step{};
    double first = 0.0;
    double last = 1.0;
};

const EncodeTable& encode_table() {
    static const EncodeTable table = [] {
        const auto& thresholds = encode_thresholds();
        EncodeTable t;
        t.first = thresholds.front();
        t.last = thresholds.back();
        for (int idx = 0; idx < kEncodeBins; ++idx) {
            const double lo = static_cast<double>(idx) / kEncodeBins;
            const double hi = static_cast<double>(idx + 1) / kEncodeBins;
            const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), lo);
            const auto base = static_cast<std::size_t>(it - thresholds.begin());
            t.base[idx] = static_cast<std::uint8_t>(base);
            t.step[idx] = (base < thresholds.size() && thresholds[base] < hi)
                              ? thresholds[base]
                              : std::numeric_limits<double>::infinity();
            if (base + 1 < thresholds.size() && thresholds[base + 1] < hi) {
                throw std::logic_error("sRGB encode bins must hold at most one threshold");
            }
        }
        return t;
    }();
    return table;
}

}  // namespace

double srgb_oetf(double linear) {
    const double v = std::clamp(linear, 0.0, 1.0);
    if (v <= kSrgbLinearThreshold) {
        return 12.92 * v;
    }
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_eotf(double encoded) {
    const double e = std::clamp(encoded, 0.0, 1.0);
    if (e <= kSrgbEncodedThreshold) {
        return e / 12.92;
    }
    return std::pow((e + 0.055) / 1.055, 2.4);
}

std::uint8_t srgb_encode_value(double linear) {
    const EncodeTable& table = encode_table();
    if (!(linear >= table.first)) {
        return 0;
    }
    if (linear >= table.last) {
        return 255;
    }
    const int idx = static_cast<int>(linear * kEncodeBins);
    return static_cast<std::uint8_t>(table.base[idx] + (linear >= table.step[idx] ? 1 : 0));
}

float srgb_decode_code(std::uint8_t code) {
    return decode_table()[code];
}

SrgbImage srgb_encode(const LinearImage& img) {
    SrgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = srgb_encode_value(img.data[i]);
    }
    return out;
}

LinearImage srgb_decode(const SrgbImage& img) {
    LinearImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = srgb_decode_code(img.data[i]);
    }
    return out;
}

GrayImage luminance(const SrgbImage& img) {
    GrayImage out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i, p += 3) {
        out.data[i] = static_cast<float>((0.2126 * p[0] + 0.7152 * p[1] + 0.0722 * p[2]) / 255.0);
    }
    return out;
}

GrayImage luminance(const LinearImage& img) {
    GrayImage out(img.width, img.height);
    const float* p = img.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i, p += 3) {
        const double r = std::clamp<double>(p[0], 0.0, 1.0);
        const double g = std::clamp<double>(p[1], 0.0, 1.0);
        const double b = std::clamp<double>(p[2], 0.0, 1.0);
        out.data[i] = static_cast<float>(0.2126 * r + 0.7152 * g + 0.0722 * b);
    }
    return out;
}

double mean_intensity(const SrgbImage& img) {
    if (img.data.empty()) {
        throw ImageError("empty input");
    }
    std::uint64_t sum = 0;
    for (std::uint8_t v : img.data) {
        sum += v;
    }
    return static_cast<double>(sum) / (255.0 * static_cast<double>(img.data.size()));
}

}  // namespace mefgen
