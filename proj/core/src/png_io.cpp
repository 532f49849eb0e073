#include "mefgen/png_io.hpp"

#include "mefgen/color.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>

namespace mefgen {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& cause) {
    throw IoError(path.string() + ": " + cause);
}

struct PngRaster {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    std::vector<std::uint8_t> bytes8;    // filled when bit_depth == 8
    std::vector<std::uint16_t> words16;  // filled when bit_depth == 16
};

PngRaster read_rgb_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(path, "cannot open file for reading");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        fail(path, "not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt or truncated PNG data");
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported channel count (expected 3-channel RGB)");
    }
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth " + std::to_string(bit_depth) + " (expected 8 or 16)");
    }
    if (bit_depth == 16 && std::endian::native == std::endian::little) {
        png_set_swap(png);
    }
    png_read_update_info(png, info);

    PngRaster raster;
    raster.width = width;
    raster.height = height;
    raster.bit_depth = bit_depth;

    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    std::vector<png_bytep> rows(height);
    if (bit_depth == 8) {
        raster.bytes8.resize(n);
        for (int y = 0; y < height; ++y) {
            rows[y] = raster.bytes8.data() + static_cast<std::size_t>(y) * width * 3;
        }
    } else {
        raster.words16.resize(n);
        for (int y = 0; y < height; ++y) {
            rows[y] = reinterpret_cast<png_bytep>(raster.words16.data() + static_cast<std::size_t>(y) * width * 3);
        }
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raster;
}

void write_rgb_png(const std::filesystem::path& path, int width, int height, int bit_depth, png_bytep* rows) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "failed to write PNG data");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16 && std::endian::native == std::endian::little) {
        png_set_swap(png);
    }
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

LinearImage load_image(const std::filesystem::path& path) {
    PngRaster raster = read_rgb_png(path);
    LinearImage out(raster.width, raster.height);
    if (raster.bit_depth == 8) {
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            out.data[i] = srgb_decode_code(raster.bytes8[i]);
        }
    } else {
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            out.data[i] = static_cast<float>(raster.words16[i]) / 65535.0f;
        }
    }
    return out;
}

SrgbImage load_srgb(const std::filesystem::path& path) {
    PngRaster raster = read_rgb_png(path);
    if (raster.bit_depth != 8) {
        fail(path, "unsupported bit depth " + std::to_string(raster.bit_depth) + " (expected 8-bit sRGB)");
    }
    SrgbImage out(raster.width, raster.height);
    out.data = std::move(raster.bytes8);
    return out;
}

void save_image(const std::filesystem::path& path, const SrgbImage& img) {
    validate(img);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) {
        rows[y] = const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(y) * img.width * 3);
    }
    write_rgb_png(path, img.width, img.height, 8, rows.data());
}

void save_image(const std::filesystem::path& path, const LinearImage& img) {
    validate(img);
    std::vector<std::uint16_t> words(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp<double>(img.data[i], 0.0, 1.0);
        words[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) {
        rows[y] = reinterpret_cast<png_bytep>(words.data() + static_cast<std::size_t>(y) * img.width * 3);
    }
    write_rgb_png(path, img.width, img.height, 16, rows.data());
}

}  // namespace mefgen
