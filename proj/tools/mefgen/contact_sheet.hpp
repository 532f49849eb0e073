#pragma once

#include "mefgen/exposure.hpp"
#include "mefgen/image.hpp"

#include <string>

namespace mefgen::cli {

// Draw ASCII text (digits, sign, dot, E, V) with a built-in 5x7 bitmap font.
void draw_label(SrgbImage& img, int x, int y, const std::string& text, int scale = 2);

// Frames side by side over a caption strip with their EV labels.
SrgbImage contact_sheet(const ExposureStack& stack);

}  // namespace mefgen::cli
