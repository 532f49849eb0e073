#pragma once

#include "mefgen/image.hpp"

#include <cstdint>

namespace mefgen {

// IEC 61966-2-1 opto-electronic transfer: linear [0,1] -> encoded [0,1].
// Inputs outside [0,1] are clipped first.
double srgb_oetf(double linear);
// Exact functional inverse of srgb_oetf on [0,1].
double srgb_eotf(double encoded);

// Encoded value of one 8-bit code, i.e. srgb_eotf(code / 255).
float srgb_decode_code(std::uint8_t code);
// Quantize one linear value to an 8-bit code: round(255 * srgb_oetf(v)).
std::uint8_t srgb_encode_value(double linear);

// Simplified ISP forward transform: clip, apply the sRGB curve, quantize.
SrgbImage srgb_encode(const LinearImage& img);
// Inverse of the encode curve applied to code/255.
LinearImage srgb_decode(const SrgbImage& img);

// Rec. 709 weights 0.2126 R + 0.7152 G + 0.0722 B on channel values
// normalized to [0,1]. Linear inputs are clamped to [0,1] per channel so the
// output always lies in [0,1].
GrayImage luminance(const SrgbImage& img);
GrayImage luminance(const LinearImage& img);

// Arithmetic mean of all channel values divided by 255. Throws ImageError on
// an empty image.
double mean_intensity(const SrgbImage& img);

}  // namespace mefgen
