#include "mefgen/color.hpp"
#include "mefgen/iqa.hpp"
#include "mefgen/pyramid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mefgen {

namespace {

constexpr double kSharpnessFloor = 1e-4;  // absolute gate on 0..255-scaled data

GrayImage to_gray255(const SrgbImage& img) {
    GrayImage gray = luminance(img);
    for (float& v : gray.data) {
        v *= 255.0f;
    }
    return gray;
}

// the four pairwise-product neighbourhoods: horizontal, vertical, both diagonals
constexpr int kShift[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};  // (dx, dy)

// 18 features from one MSCN patch: AGGD of the coefficients (alpha, mean of
// left/right variances), then (alpha, mean, sigma_l^2, sigma_r^2) per product.
void patch_features(const GrayImage& coeffs, int x0, int y0, int size, double* out) {
    std::vector<float> samples;
    samples.reserve(static_cast<std::size_t>(size) * size);
    for (int y = y0; y < y0 + size; ++y) {
        for (int x = x0; x < x0 + size; ++x) {
            samples.push_back(coeffs.at(x, y));
        }
    }
    const AggdFit base = fit_aggd(samples);
    out[0] = base.alpha;
    out[1] = (base.sigma_left * base.sigma_left + base.sigma_right * base.sigma_right) / 2.0;

    int idx = 2;
    std::vector<float> products;
    for (const auto& shift : kShift) {
        products.clear();
        for (int y = y0; y < y0 + size; ++y) {
            const int yy = y + shift[1];
            if (yy < y0 || yy >= y0 + size) continue;
            for (int x = x0; x < x0 + size; ++x) {
                const int xx = x + shift[0];
                if (xx < x0 || xx >= x0 + size) continue;
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

Eigen::Map<const Eigen::Matrix<double, kIqaFeatureCount, kIqaFeatureCount, Eigen::RowMajor>> cov_map(
    const NiqeModel& m) {
    return Eigen::Map<const Eigen::Matrix<double, kIqaFeatureCount, kIqaFeatureCount, Eigen::RowMajor>>(
        m.feature_cov.data());
}

void pooled_stats(const std::vector<FeatureVector>& rows, FeatureVector& mean,
                  std::array<double, kIqaFeatureCount * kIqaFeatureCount>& cov) {
    const double n = static_cast<double>(rows.size());
    mean.fill(0.0);
    for (const FeatureVector& row : rows) {
        for (int i = 0; i < kIqaFeatureCount; ++i) {
            mean[i] += row[i];
        }
    }
    for (double& v : mean) {
        v /= n;
    }
    cov.fill(0.0);
    if (rows.size() < 2) {
        return;
    }
    for (const FeatureVector& row : rows) {
        for (int i = 0; i < kIqaFeatureCount; ++i) {
            const double di = row[i] - mean[i];
            for (int j = i; j < kIqaFeatureCount; ++j) {
                cov[i * kIqaFeatureCount + j] += di * (row[j] - mean[j]);
            }
        }
    }
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        for (int j = i; j < kIqaFeatureCount; ++j) {
            const double v = cov[i * kIqaFeatureCount + j] / (n - 1.0);
            cov[i * kIqaFeatureCount + j] = v;
            cov[j * kIqaFeatureCount + i] = v;
        }
    }
}

}  // namespace

std::vector<FeatureVector> niqe_features(const GrayImage& gray255, int patch_size, double sharpness_fraction) {
    validate(gray255);
    if (patch_size < 16 || patch_size % 2 != 0) {
        throw IqaError("patch size must be even and >= 16");
    }
    if (!(sharpness_fraction > 0.0 && sharpness_fraction <= 1.0)) {
        throw IqaError("sharpness fraction must lie in (0,1]");
    }
    const int cols = gray255.width / patch_size;
    const int rows = gray255.height / patch_size;
    if (cols < 1 || rows < 1) {
        throw IqaError("image smaller than one patch (" + std::to_string(patch_size) + "px)");
    }

    // crop to a whole number of patches so both scales stay aligned
    GrayImage cropped(cols * patch_size, rows * patch_size);
    for (int y = 0; y < cropped.height; ++y) {
        for (int x = 0; x < cropped.width; ++x) {
            cropped.at(x, y) = gray255.at(x, y);
        }
    }

    const MscnResult native = mscn_with_sigma(cropped);
    const GrayImage half_img = pyr_downsample(cropped);
    const GrayImage half_coeffs = mscn(half_img);

    // sharpness = mean local sigma per patch, gated at the native scale
    const int patch_count = rows * cols;
    std::vector<double> sharpness(patch_count, 0.0);
    for (int py = 0; py < rows; ++py) {
        for (int px = 0; px < cols; ++px) {
            double acc = 0.0;
            for (int y = py * patch_size; y < (py + 1) * patch_size; ++y) {
                for (int x = px * patch_size; x < (px + 1) * patch_size; ++x) {
                    acc += native.sigma.at(x, y);
                }
            }
            sharpness[py * cols + px] = acc / (static_cast<double>(patch_size) * patch_size);
        }
    }
    std::vector<double> sorted = sharpness;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q_index = static_cast<std::size_t>(sharpness_fraction * (patch_count - 1));
    const double threshold = std::max(sorted[q_index], kSharpnessFloor);

    std::vector<FeatureVector> features;
    const int half_patch = patch_size / 2;
    for (int py = 0; py < rows; ++py) {
        for (int px = 0; px < cols; ++px) {
            if (sharpness[py * cols + px] < threshold) continue;
            FeatureVector row{};
            patch_features(native.coefficients, px * patch_size, py * patch_size, patch_size, row.data());
            patch_features(half_coeffs, px * half_patch, py * half_patch, half_patch, row.data() + 18);
            features.push_back(row);
        }
    }
    if (features.empty()) {
        throw IqaError("no valid patches");
    }
    return features;
}

NiqeModel fit_niqe_model(const std::vector<SrgbImage>& corpus, int patch_size, double sharpness_fraction) {
    if (corpus.size() < 10) {
        throw IqaError("fit_niqe_model needs at least 10 images");
    }
    std::vector<FeatureVector> pooled;
    for (const SrgbImage& img : corpus) {
        std::vector<FeatureVector> rows = niqe_features(to_gray255(img), patch_size, sharpness_fraction);
        pooled.insert(pooled.end(), rows.begin(), rows.end());
    }
    NiqeModel model;
    model.patch_size = patch_size;
    model.sharpness_fraction = sharpness_fraction;
    pooled_stats(pooled, model.feature_mean, model.feature_cov);
    return model;
}

IqaScore niqe(const SrgbImage& img, const NiqeModel& model) {
    const std::vector<FeatureVector> rows = niqe_features(to_gray255(img), model.patch_size,
                                                          model.sharpness_fraction);
    NiqeModel test;
    pooled_stats(rows, test.feature_mean, test.feature_cov);

    using Matrix = Eigen::Matrix<double, kIqaFeatureCount, kIqaFeatureCount>;
    using Vector = Eigen::Matrix<double, kIqaFeatureCount, 1>;

    Matrix pooled = (Matrix(cov_map(model)) + Matrix(cov_map(test))) / 2.0;
    Vector diff;
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        diff(i) = model.feature_mean[i] - test.feature_mean[i];
    }

    // pseudo-inverse through the eigendecomposition; small fitting corpora
    // routinely give rank-deficient covariance, and near-null directions
    // carry no signal, only amplified noise
    Eigen::SelfAdjointEigenSolver<Matrix> solver(pooled);
    if (solver.info() != Eigen::Success) {
        throw IqaError("covariance eigendecomposition failed");
    }
    const Vector evals = solver.eigenvalues();
    const double cutoff = std::max(evals.cwiseAbs().maxCoeff(), 1e-300) * 1e-6;
    Vector inv = Vector::Zero();
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        if (evals(i) > cutoff) {
            inv(i) = 1.0 / evals(i);
        }
    }
    const Vector projected = solver.eigenvectors().transpose() * diff;
    const double quad = (projected.array().square() * inv.array()).sum();
    return {"niqe", std::sqrt(std::max(quad, 0.0)), Polarity::lower_better};
}

int niqe_model_rank(const NiqeModel& model) {
    using Matrix = Eigen::Matrix<double, kIqaFeatureCount, kIqaFeatureCount>;
    Eigen::SelfAdjointEigenSolver<Matrix> solver((Matrix(cov_map(model))));
    if (solver.info() != Eigen::Success) {
        return 0;
    }
    const auto evals = solver.eigenvalues();
    const double cutoff = std::max(evals.cwiseAbs().maxCoeff(), 1e-300) * 1e-6;
    int rank = 0;
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        rank += evals(i) > cutoff;
    }
    return rank;
}

void save_niqe_model(const std::filesystem::path& path, const NiqeModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw IqaError(path.string() + ": cannot open for writing");
    }
    out << "niqe-model v1\n";
    out << model.patch_size << " " << model.sharpness_fraction << "\n";
    out.precision(17);
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        out << (i ? " " : "") << model.feature_mean[i];
    }
    out << "\n";
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        for (int j = 0; j < kIqaFeatureCount; ++j) {
            out << (j ? " " : "") << model.feature_cov[i * kIqaFeatureCount + j];
        }
        out << "\n";
    }
    if (!out) {
        throw IqaError(path.string() + ": write failed");
    }
}

NiqeModel load_niqe_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IqaError(path.string() + ": cannot open for reading");
    }
    std::string header;
    std::getline(in, header);
    if (header != "niqe-model v1") {
        throw IqaError(path.string() + ": not a niqe-model v1 file");
    }
    NiqeModel model;
    in >> model.patch_size >> model.sharpness_fraction;
    for (double& v : model.feature_mean) {
        in >> v;
    }
    for (double& v : model.feature_cov) {
        in >> v;
    }
    if (!in) {
        throw IqaError(path.string() + ": truncated or malformed model file");
    }
    // symmetry within 1e-9 is part of the type contract
    for (int i = 0; i < kIqaFeatureCount; ++i) {
        for (int j = i + 1; j < kIqaFeatureCount; ++j) {
            if (std::abs(model.feature_cov[i * kIqaFeatureCount + j] -
                         model.feature_cov[j * kIqaFeatureCount + i]) > 1e-9) {
                throw IqaError(path.string() + ": covariance matrix is not symmetric");
            }
        }
    }
    return model;
}

}  // namespace mefgen
