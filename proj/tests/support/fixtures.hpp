#pragma once

#include "mefgen/exposure.hpp"
#include "mefgen/image.hpp"
#include "mefgen/rng.hpp"

#include <cstdint>
#include <vector>

namespace mefgen::test {

// Uniform-random rasters.
GrayImage random_gray(int w, int h, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f);
LinearImage random_linear(int w, int h, std::uint64_t seed, float max_value = 1.0f);
SrgbImage random_srgb(int w, int h, std::uint64_t seed);

// Multi-octave value noise in [0,1]: smooth structure at several scales,
// a stand-in for natural image content in metric and pipeline tests.
// decay is the per-octave amplitude falloff (lower = more texture).
GrayImage value_noise(int w, int h, std::uint64_t seed, double decay = 0.55);

// Colored natural-ish fixtures built from value noise.
LinearImage scene_linear(int w, int h, std::uint64_t seed, float dynamic_range = 4.0f);
SrgbImage scene_srgb(int w, int h, std::uint64_t seed);

// Additive Gaussian pixel noise with sigma expressed in 8-bit code units.
SrgbImage add_gaussian_noise(const SrgbImage& img, double sigma_codes, std::uint64_t seed);

// Bracketed-ramp fixture for dynamic-range tests: a monotone horizontal
// ramp in log2(value), piecewise so that pixel mass concentrates in two
// recoverable zones. Roughly a third of the pixels crush to black at -2 EV
// (but survive at 0/+2), and a third blow out at 0/+2 EV (but sit mid-range
// at -2), so a -2/0/+2 bracket can always be fused with far fewer clipped
// pixels than any single frame.
LinearImage exposure_ramp(int w, int h);

// Count of pixels having any channel at code 0 or 255.
std::size_t clipped_pixel_count(const SrgbImage& img);

// Deterministic synthetic samples for distribution-recovery tests.
std::vector<float> gaussian_samples(std::size_t n, std::uint64_t seed);
std::vector<float> laplacian_samples(std::size_t n, std::uint64_t seed);

}  // namespace mefgen::test
