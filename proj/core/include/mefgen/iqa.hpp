#pragma once

#include "mefgen/image.hpp"
#include "mefgen/scoring.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mefgen {

struct IqaError : std::runtime_error {
    explicit IqaError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kIqaFeatureCount = 36;
using FeatureVector = std::array<double, kIqaFeatureCount>;

// ---------------------------------------------------------------------------
// MSCN + AGGD primitives
// ---------------------------------------------------------------------------

// Mean-subtracted contrast-normalized coefficients: (I - mu) / (sigma + 1)
// with local Gaussian-weighted mean/stddev (7x7 kernel, sigma 7/6,
// edge-clamped). Callers feed luminance scaled to [0,255] so the +1
// stabilizer matches the published metrics. Requires min dim >= 16.
GrayImage mscn(const GrayImage& img);

// Also exposes the local sigma field (used for patch sharpness gating).
struct MscnResult {
    GrayImage coefficients;
    GrayImage sigma;
};
MscnResult mscn_with_sigma(const GrayImage& img);

struct AggdFit {
    double alpha = 0.0;
    double sigma_left = 0.0;
    double sigma_right = 0.0;
};

// Moment-matching asymmetric generalized Gaussian fit: solves the
// gamma-function relation for alpha by nearest match over a precomputed grid
// alpha in [0.2, 10] step 1e-3. Needs >= 100 samples with both signs present
// and non-degenerate variance.
AggdFit fit_aggd(const std::vector<float>& samples);

// Mean of the AGGD with the given parameters; the "mean eta" feature of the
// pairwise-product fits.
double aggd_mean(const AggdFit& fit);

// ---------------------------------------------------------------------------
// NIQE
// ---------------------------------------------------------------------------

struct NiqeModel {
    FeatureVector feature_mean{};
    // row-major 36x36 symmetric covariance
    std::array<double, kIqaFeatureCount * kIqaFeatureCount> feature_cov{};
    int patch_size = 96;
    double sharpness_fraction = 0.75;
};

// Per-patch 36-vectors: AGGD fits of MSCN and its 4 pairwise products at two
// scales (native and 2x downsampled). Patches below the sharpness_fraction
// quantile of local variance are discarded at the native scale; an entirely
// flat image yields no valid patches.
std::vector<FeatureVector> niqe_features(const GrayImage& gray255, int patch_size, double sharpness_fraction);

// Pristine-model fitting: mean and covariance of pooled patch features over
// >= 10 images. Rank-deficient covariance is fine; scoring uses a
// pseudo-inverse.
NiqeModel fit_niqe_model(const std::vector<SrgbImage>& corpus, int patch_size = 96,
                         double sharpness_fraction = 0.75);

// sqrt((nu1-nu2)^T ((Sigma1+Sigma2)/2)^+ (nu1-nu2)) between the model stats
// and the test image's patch stats. Lower is better.
IqaScore niqe(const SrgbImage& img, const NiqeModel& model);

// Numerical rank of the model covariance. Below 36 means the fitting corpus
// was too small to span the feature space; scoring still works through the
// pseudo-inverse.
int niqe_model_rank(const NiqeModel& model);

// Plain-text model file: line 1 "niqe-model v1"; line 2 patch_size and
// sharpness_fraction; line 3 the 36 means; then 36 covariance rows.
void save_niqe_model(const std::filesystem::path& path, const NiqeModel& model);
NiqeModel load_niqe_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// BRISQUE
// ---------------------------------------------------------------------------

struct BrisqueRegressor {
    FeatureVector coefficients{};
    double bias = 0.0;
    // per-feature (min,max) scaling ranges, libsvm style: maps to [-1,1]
    std::array<double, kIqaFeatureCount> range_min{};
    std::array<double, kIqaFeatureCount> range_max{};

    // Deterministic built-in regressor (identity scaling, uniform
    // coefficients). Useful only for ranking; carries no perceptual calibration.
    static BrisqueRegressor fallback();
};

// Whole-image NSS features (no patch gating), two scales, 36 total.
FeatureVector brisque_features(const SrgbImage& img);

// Linear regressor applied to range-normalized features. Lower is better.
IqaScore brisque(const SrgbImage& img, const BrisqueRegressor& reg);

// "brisque-linear v1" header, 36 coefficients + bias, then 36 min/max pairs.
void save_brisque_regressor(const std::filesystem::path& path, const BrisqueRegressor& reg);
BrisqueRegressor load_brisque_regressor(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// External scorer adapter
// ---------------------------------------------------------------------------

struct ExternalScorerConfig {
    std::vector<std::string> command;  // argv prefix; the image path is appended
    std::string metric_name = "external";
    Polarity polarity = Polarity::higher_better;
    double timeout_seconds = 60.0;
};

// Writes the image to a temp PNG, runs the command, and parses exactly one
// decimal from its stdout. Nonzero exit, unparseable output, and timeout are
// distinct errors. Concurrent invocations are bounded process-wide.
IqaScore external_score(const SrgbImage& img, const ExternalScorerConfig& cfg);

// Process-wide cap on concurrently running scorer subprocesses (default 4).
void set_external_scorer_parallelism(int limit);

}  // namespace mefgen
