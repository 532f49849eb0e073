#include "contact_sheet.hpp"

#include <cstdio>
#include <map>

namespace mefgen::cli {

namespace {

// 5x7 glyphs, one 5-bit mask per row
const std::map<char, std::array<std::uint8_t, 7>>& font() {
    static const std::map<char, std::array<std::uint8_t, 7>> glyphs = {
        {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
        {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
        {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
        {'3', {0x1e, 0x01, 0x01, 0x0e, 0x01, 0x01, 0x1e}},
        {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
        {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
        {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
        {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
        {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
        {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
        {'+', {0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00}},
        {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
        {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
        {'E', {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f}},
        {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04}},
        {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
    };
    return glyphs;
}

void put_pixel(SrgbImage& img, int x, int y, std::uint8_t v) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = v;
}

}  // namespace

void draw_label(SrgbImage& img, int x, int y, const std::string& text, int scale) {
    int cx = x;
    for (char c : text) {
        const auto it = font().find(c);
        if (it == font().end()) {
            cx += 6 * scale;
            continue;
        }
        for (int row = 0; row < 7; ++row) {
            for (int col = 0; col < 5; ++col) {
                if (!(it->second[row] & (1 << (4 - col)))) continue;
                for (int sy = 0; sy < scale; ++sy) {
                    for (int sx = 0; sx < scale; ++sx) {
                        put_pixel(img, cx + col * scale + sx, y + row * scale + sy, 255);
                    }
                }
            }
        }
        cx += 6 * scale;
    }
}

SrgbImage contact_sheet(const ExposureStack& stack) {
    const int gap = 2;
    const int caption = 20;
    const int fw = stack.frames.front().width;
    const int fh = stack.frames.front().height;
    const int n = static_cast<int>(stack.size());
    SrgbImage sheet(n * fw + (n - 1) * gap, fh + caption);
    // dark caption strip, black gaps
    for (int y = 0; y < caption; ++y) {
        for (int x = 0; x < sheet.width; ++x) {
            put_pixel(sheet, x, y, 32);
        }
    }
    for (int i = 0; i < n; ++i) {
        const int x0 = i * (fw + gap);
        const SrgbImage& frame = stack.frames[i];
        for (int y = 0; y < fh; ++y) {
            for (int x = 0; x < fw; ++x) {
                for (int c = 0; c < 3; ++c) {
                    sheet.at(x0 + x, caption + y, c) = frame.at(x, y, c);
                }
            }
        }
        char label[32];
        std::snprintf(label, sizeof(label), "EV%+.2f", stack.evs[i]);
        draw_label(sheet, x0 + 4, 3, label);
    }
    return sheet;
}

}  // namespace mefgen::cli
