#include "fixtures.hpp"

#include "mefgen/color.hpp"

#include <algorithm>
#include <cmath>

namespace mefgen::test {

GrayImage random_gray(int w, int h, std::uint64_t seed, float lo, float hi) {
    Rng rng(seed);
    GrayImage img(w, h);
    for (float& v : img.data) {
        v = lo + (hi - lo) * static_cast<float>(rng.uniform01());
    }
    return img;
}

LinearImage random_linear(int w, int h, std::uint64_t seed, float max_value) {
    Rng rng(seed);
    LinearImage img(w, h);
    for (float& v : img.data) {
        v = max_value * static_cast<float>(rng.uniform01());
    }
    return img;
}

SrgbImage random_srgb(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    SrgbImage img(w, h);
    for (std::uint8_t& v : img.data) {
        v = static_cast<std::uint8_t>(rng.below(256));
    }
    return img;
}

GrayImage value_noise(int w, int h, std::uint64_t seed, double decay) {
    GrayImage out(w, h, 0.0f);
    double amplitude = 1.0;
    double total = 0.0;
    int grid = 4;
    for (int octave = 0; octave < 8 && grid <= 2 * std::max(w, h); ++octave) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(octave)));
        std::vector<float> lattice(static_cast<std::size_t>(grid) * grid);
        for (float& v : lattice) {
            v = static_cast<float>(rng.uniform01());
        }
        for (int y = 0; y < h; ++y) {
            const double gy = (h > 1 ? static_cast<double>(y) / (h - 1) : 0.0) * (grid - 1);
            const int y0 = std::min(static_cast<int>(gy), grid - 2);
            const double fy = gy - y0;
            for (int x = 0; x < w; ++x) {
                const double gx = (w > 1 ? static_cast<double>(x) / (w - 1) : 0.0) * (grid - 1);
                const int x0 = std::min(static_cast<int>(gx), grid - 2);
                const double fx = gx - x0;
                const double v00 = lattice[static_cast<std::size_t>(y0) * grid + x0];
                const double v10 = lattice[static_cast<std::size_t>(y0) * grid + x0 + 1];
                const double v01 = lattice[static_cast<std::size_t>(y0 + 1) * grid + x0];
                const double v11 = lattice[static_cast<std::size_t>(y0 + 1) * grid + x0 + 1];
                const double v = (v00 * (1 - fx) + v10 * fx) * (1 - fy) + (v01 * (1 - fx) + v11 * fx) * fy;
                out.at(x, y) += static_cast<float>(amplitude * v);
            }
        }
        total += amplitude;
        amplitude *= decay;
        grid *= 2;
    }
    for (float& v : out.data) {
        v = static_cast<float>(v / total);
    }
    return out;
}

LinearImage scene_linear(int w, int h, std::uint64_t seed, float dynamic_range) {
    // per-seed texture scale keeps the family diverse
    Rng params(derive_seed(seed, "scene-params"));
    const double decay = 0.45 + 0.3 * params.uniform01();
    const GrayImage base = value_noise(w, h, seed, decay);
    const GrayImage tint_r = value_noise(w, h, derive_seed(seed, "tint-r"), decay);
    const GrayImage tint_b = value_noise(w, h, derive_seed(seed, "tint-b"), decay);
    LinearImage img(w, h);
    for (std::size_t i = 0; i < base.data.size(); ++i) {
        // map [0,1] noise onto an exponential irradiance range
        const double stops = (static_cast<double>(base.data[i]) - 0.5) * 2.0 * dynamic_range;
        const double luma = std::exp2(stops) * 0.18;
        const double r_gain = 0.7 + 0.6 * tint_r.data[i];
        const double b_gain = 0.7 + 0.6 * tint_b.data[i];
        img.data[i * 3 + 0] = static_cast<float>(luma * r_gain);
        img.data[i * 3 + 1] = static_cast<float>(luma);
        img.data[i * 3 + 2] = static_cast<float>(luma * b_gain);
    }
    return img;
}

SrgbImage scene_srgb(int w, int h, std::uint64_t seed) {
    Rng params(derive_seed(seed, "scene-srgb-params"));
    const float range = static_cast<float>(1.0 + 1.2 * params.uniform01());
    const double grain = 0.3 + 1.2 * params.uniform01();
    // faint sensor-like grain; real photographs are never noise-free
    return add_gaussian_noise(srgb_encode(scene_linear(w, h, seed, range)), grain,
                              derive_seed(seed, "grain"));
}

SrgbImage add_gaussian_noise(const SrgbImage& img, double sigma_codes, std::uint64_t seed) {
    Rng rng(seed);
    SrgbImage out = img;
    for (std::uint8_t& v : out.data) {
        // Box-Muller
        const double u1 = std::max(rng.uniform01(), 1e-12);
        const double u2 = rng.uniform01();
        const double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        const double noisy = static_cast<double>(v) + sigma_codes * n;
        v = static_cast<std::uint8_t>(std::clamp(std::lround(noisy), 0L, 255L));
    }
    return out;
}

LinearImage exposure_ramp(int w, int h) {
    // knots in (t, log2 value): 35% deep shadows (black at -2 EV, alive at
    // 0/+2), a narrow mid band, then 45% highlights (white at 0 and/or +2 EV,
    // mid-range at -2)
    const double knot_t[] = {0.00, 0.35, 0.40, 0.45, 0.50, 0.60, 0.65, 1.00};
    const double knot_x[] = {-12.3, -11.0, -8.0, -7.0, -1.9, -0.1, 0.1, 1.9};
    const int knots = 8;
    LinearImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double t = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
            int k = 0;
            while (k + 2 < knots && t > knot_t[k + 1]) {
                ++k;
            }
            const double f = (t - knot_t[k]) / (knot_t[k + 1] - knot_t[k]);
            const double stops = knot_x[k] + f * (knot_x[k + 1] - knot_x[k]);
            for (int c = 0; c < 3; ++c) {
                img.at(x, y, c) = static_cast<float>(std::exp2(stops));
            }
        }
    }
    return img;
}

std::size_t clipped_pixel_count(const SrgbImage& img) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        bool clipped = false;
        for (int c = 0; c < 3; ++c) {
            const std::uint8_t v = img.data[i * 3 + c];
            clipped = clipped || v == 0 || v == 255;
        }
        count += clipped;
    }
    return count;
}

std::vector<float> gaussian_samples(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; i += 2) {
        const double u1 = std::max(rng.uniform01(), 1e-12);
        const double u2 = rng.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = static_cast<float>(r * std::cos(2.0 * M_PI * u2));
        if (i + 1 < n) {
            out[i + 1] = static_cast<float>(r * std::sin(2.0 * M_PI * u2));
        }
    }
    return out;
}

std::vector<float> laplacian_samples(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01() - 0.5;
        const double mag = std::log(std::max(1.0 - 2.0 * std::abs(u), 1e-15));
        out[i] = static_cast<float>(u < 0 ? mag : -mag);
    }
    return out;
}

}  // namespace mefgen::test
