#include "mefgen/color.hpp"
#include "mefgen/iqa.hpp"
#include "mefgen/pyramid.hpp"

#include <cmath>
#include <fstream>

namespace mefgen {

namespace {

constexpr int kShift[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

// whole-image variant of the per-patch NIQE features
void image_features(const GrayImage& coeffs, double* out) {
    std::vector<float> samples(coeffs.data.begin(), coeffs.data.end());
    const AggdFit base = fit_aggd(samples);
    out[0] = base.alpha;
    out[1] = (base.sigma_left * base.sigma_left + base.sigma_right * base.sigma_right) / 2.0;

    int idx = 2;
    std::vector<float> products;
    for (const auto& shift : kShift) {
        products.clear();
        for (int y = 0; y < coeffs.height; ++y) {
            const int yy = y + shift[1];
            if (yy < 0 || yy >= coeffs.height) continue;
            for (int x = 0; x < coeffs.width; ++x) {
                const int xx = x + shift[0];
                if (xx < 0 || xx >= coeffs.width) continue;
                products.push_back(coeffs.at(x, y) * coeffs.at(xx, yy));
            }
        }
        const AggdFit fit = fit_aggd(products);
        out[idx++] = fit.alpha;
        out[idx++] = aggd_mean(fit);
        out[idx++] = fit.sigma_left * fit.sigma_left;
        out[idx++] = fit.sigma_right * fit.sigma_right;
    }
}

}  // namespace

FeatureVector brisque_features(const SrgbImage& img) {
    GrayImage gray = luminance(img);
    for (float& v : gray.data) {
        v *= 255.0f;
    }
    FeatureVector features{};
    image_features(mscn(gray), features.data());
    image_features(mscn(pyr_downsample(gray)), features.data() + 18);
    return features;
}

BrisqueRegressor BrisqueRegressor::fallback() {
    BrisqueRegressor reg;
    reg.coefficients.fill(1.0 / kIqaFeatureCount);
    reg.bias = 0.0;
    // (-1, 1) ranges make the scaling an identity map
    reg.range_min.fill(-1.0);
    reg.range_max.fill(1.0);
    return reg;
}

IqaScore brisque(const SrgbImage& img, const BrisqueRegressor& reg) {
    const FeatureVector f = brisque_features(img);
    double score = reg.bias;
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        const double span = reg.range_max[i] - reg.range_min[i];
        const double scaled = span != 0.0 ? -1.0 + 2.0 * (f[i] - reg.range_min[i]) / span : 0.0;
        score += reg.coefficients[i] * scaled;
    }
    return {"brisque", score, Polarity::lower_better};
}

void save_brisque_regressor(const std::filesystem::path& path, const BrisqueRegressor& reg) {
    std::ofstream out(path);
    if (!out) {
        throw IqaError(path.string() + ": cannot open for writing");
    }
    out << "brisque-linear v1\n";
    out.precision(17);
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        out << (i ? " " : "") << reg.coefficients[i];
    }
    out << "\n" << reg.bias << "\n";
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        out << reg.range_min[i] << " " << reg.range_max[i] << "\n";
    }
    if (!out) {
        throw IqaError(path.string() + ": write failed");
    }
}

BrisqueRegressor load_brisque_regressor(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IqaError(path.string() + ": cannot open for reading");
    }
    std::string header;
    std::getline(in, header);
    if (header != "brisque-linear v1") {
        throw IqaError(path.string() + ": not a brisque-linear v1 file");
    }
    BrisqueRegressor reg;
    for (double& v : reg.coefficients) {
        in >> v;
    }
    in >> reg.bias;
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        in >> reg.range_min[i] >> reg.range_max[i];
    }
    if (!in) {
        throw IqaError(path.string() + ": truncated or malformed regressor file");
    }
    return reg;
}

}  // namespace mefgen
