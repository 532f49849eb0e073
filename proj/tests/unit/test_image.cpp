#include "doctest.h"

#include "mefgen/color.hpp"
#include "mefgen/png_io.hpp"
#include "mefgen/rng.hpp"

#include "fixtures.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace mefgen;

namespace {

// independent scalar oracle for the sRGB transfer pair
double oracle_oetf(double v) {
    v = std::min(std::max(v, 0.0), 1.0);
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double oracle_eotf(double e) {
    return e <= 0.04045 ? e / 12.92 : std::pow((e + 0.055) / 1.055, 2.4);
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("srgb encode endpoints and mid value") {
    LinearImage img(3, 1);
    img.at(0, 0, 0) = 0.0f;
    img.at(1, 0, 0) = 1.0f;
    img.at(2, 0, 0) = 0.5f;
    const SrgbImage out = srgb_encode(img);
    CHECK(out.at(0, 0, 0) == 0);
    CHECK(out.at(1, 0, 0) == 255);
    // 255 * (1.055 * 0.5^(1/2.4) - 0.055) rounds to 188
    CHECK(std::lround(255.0 * oracle_oetf(0.5)) == 188);
    CHECK(out.at(2, 0, 0) == 188);
}

TEST_CASE("srgb decode endpoints") {
    SrgbImage img(2, 1);
    img.at(0, 0, 0) = 0;
    img.at(1, 0, 0) = 255;
    const LinearImage out = srgb_decode(img);
    CHECK(out.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(out.at(1, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("encode(decode(code)) is identity on the full 8-bit lattice") {
    for (int code = 0; code < 256; ++code) {
        const double linear = oracle_eotf(code / 255.0);
        CHECK(srgb_encode_value(srgb_decode_code(static_cast<std::uint8_t>(code))) == code);
        CHECK(srgb_encode_value(linear) == code);
    }
}

TEST_CASE("encode matches the scalar oracle on dense random inputs") {
    Rng rng(0xC0DE);
    for (int i = 0; i < 200000; ++i) {
        const double v = rng.uniform01() * 1.2 - 0.1;  // cover clipping on both sides
        const auto expect = static_cast<std::uint8_t>(std::lround(255.0 * oracle_oetf(v)));
        CHECK(srgb_encode_value(v) == expect);
    }
    // exact threshold points are the hardest case for the binned lookup
    for (int k = 1; k <= 255; ++k) {
        const double threshold = oracle_eotf((k - 0.5) / 255.0);
        CHECK(srgb_encode_value(threshold) == k);
        CHECK(srgb_encode_value(std::nextafter(threshold, 0.0)) == k - 1);
    }
}

TEST_CASE("decode(encode(x)) within quantization bound on arbitrary linear inputs") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.uniform01();
        const double back = srgb_eotf(srgb_encode_value(x) / 255.0);
        // one quantization step in encoded space never exceeds 1/255 linearly
        CHECK(std::abs(oracle_oetf(back) - oracle_oetf(x)) <= 1.0 / 255.0 + 1e-9);
    }
}

TEST_CASE("luminance uses rec709 weights") {
    SrgbImage img(3, 1);
    img.at(0, 0, 0) = 255;  // red
    img.at(0, 0, 1) = 255;  // white pixel
    img.at(0, 0, 2) = 255;
    img.at(1, 0, 1) = 255;  // pure green
    // pixel 2 stays black
    const GrayImage gray = luminance(img);
    CHECK(gray.at(0, 0) == doctest::Approx(1.0));
    CHECK(gray.at(1, 0) == doctest::Approx(0.7152));
    CHECK(gray.at(2, 0) == doctest::Approx(0.0));
}

TEST_CASE("luminance stays in [0,1] for wild linear inputs") {
    LinearImage img = test::random_linear(17, 13, 99, 8.0f);
    const GrayImage gray = luminance(img);
    for (float v : gray.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("mean intensity") {
    SrgbImage mid(5, 4);
    std::fill(mid.data.begin(), mid.data.end(), 128);
    CHECK(mean_intensity(mid) == doctest::Approx(128.0 / 255.0));

    SrgbImage black(5, 4);
    CHECK(mean_intensity(black) == doctest::Approx(0.0));

    SrgbImage checker(2, 1);
    checker.at(0, 0, 0) = checker.at(0, 0, 1) = checker.at(0, 0, 2) = 0;
    checker.at(1, 0, 0) = checker.at(1, 0, 1) = checker.at(1, 0, 2) = 255;
    CHECK(mean_intensity(checker) == doctest::Approx(0.5));

    SrgbImage empty;
    CHECK_THROWS_WITH_AS(mean_intensity(empty), "empty input", ImageError);
}

TEST_CASE("16-bit png round-trip is exact on the lattice") {
    // random image quantized to the 16-bit lattice
    LinearImage img = test::random_linear(37, 23, 1234, 1.0f);
    for (float& v : img.data) {
        v = static_cast<float>(std::lround(v * 65535.0) / 65535.0);
    }
    const auto path = temp_file("mefgen_roundtrip16.png");
    save_image(path, img);
    const LinearImage back = load_image(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
    }
    std::filesystem::remove(path);
}

TEST_CASE("8-bit png loads through the decode oracle") {
    SrgbImage img(64, 2);
    for (int x = 0; x < 64; ++x) {
        const auto code = static_cast<std::uint8_t>(x * 4);
        for (int y = 0; y < 2; ++y) {
            img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = code;
        }
    }
    const auto path = temp_file("mefgen_gradient8.png");
    save_image(path, img);
    const LinearImage linear = load_image(path);
    float prev = -1.0f;
    for (int x = 0; x < 64; ++x) {
        const float v = linear.at(x, 0, 0);
        CHECK(v == doctest::Approx(oracle_eotf(img.at(x, 0, 0) / 255.0)).epsilon(1e-6));
        CHECK(v > prev);  // monotone ramp stays monotone after decode
        prev = v;
    }
    const SrgbImage back = load_srgb(path);
    CHECK(back == img);
    std::filesystem::remove(path);
}

TEST_CASE("grayscale png is rejected with channel-count error") {
    const auto path = temp_file("mefgen_gray.png");
    {
        FILE* f = fopen(path.string().c_str(), "wb");
        REQUIRE(f != nullptr);
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png_create_info_struct(png);
        REQUIRE(setjmp(png_jmpbuf(png)) == 0);
        png_init_io(png, f);
        png_set_IHDR(png, info, 4, 4, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::uint8_t row[4] = {0, 85, 170, 255};
        for (int y = 0; y < 4; ++y) {
            png_write_row(png, row);
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        fclose(f);
    }
    CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("unsupported channel count"), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("truncated png reports corruption") {
    const auto path = temp_file("mefgen_empty.png");
    FILE* f = fopen(path.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    fclose(f);
    CHECK_THROWS_AS(load_image(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("missing file reports path and cause") {
    CHECK_THROWS_WITH_AS(load_image("/nonexistent/zzz.png"),
                         doctest::Contains("/nonexistent/zzz.png"), IoError);
}
