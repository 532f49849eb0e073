#pragma once

#include "mefgen/exposure.hpp"
#include "mefgen/image.hpp"
#include "mefgen/scoring.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace mefgen {

struct FusionError : std::runtime_error {
    explicit FusionError(const std::string& what) : std::runtime_error(what) {}
};

// Per-frame, per-pixel fusion weights and their normalized form.
struct WeightMaps {
    std::vector<GrayImage> maps;
    bool normalized = false;
};

struct FusionConfig {
    double contrast_exponent = 1.0;        // wc
    double saturation_exponent = 1.0;      // ws
    double well_exposedness_exponent = 1.0;  // we
    double epsilon = 1e-12;
    int pyramid_depth = 0;  // 0 = auto (floor(log2(min dim)) - 1)
};

// One fused image plus provenance for ensemble selection.
struct FusionCandidate {
    SrgbImage image;
    // (engine name, blend weight); weights are > 0 and sum to 1
    std::vector<std::pair<std::string, double>> provenance;
    std::vector<double> triplet_evs;  // EVs of the fused frames
    std::map<std::string, IqaScore> scores;
    std::map<std::string, double> rank_stats;  // per-metric rank, filled by selection

    std::string provenance_string() const;
};

inline const std::vector<std::string>& builtin_engines() {
    static const std::vector<std::string> names = {"mertens", "gradient", "flat-weighted"};
    return names;
}

// Mertens-family measure: per pixel w = C^wc * S^ws * E^we with C the
// absolute discrete Laplacian of luminance, S the stddev of (r,g,b), and E
// the Gaussian well-exposedness around 0.5 (sigma 0.2), channels in [0,1].
// A zero exponent disables its criterion entirely (0^0 := 1).
WeightMaps mertens_weights(const ExposureStack& stack, const FusionConfig& cfg);

// Forward-difference gradient magnitude of luminance times the
// well-exposedness term, so flat clipped regions get near-zero weight.
WeightMaps gradient_weights(const ExposureStack& stack, const FusionConfig& cfg);

// w'_j = w_j / (sum_k w_k + epsilon). All-zero pixels stay all-zero; the
// fallback happens downstream in the fuse step.
WeightMaps normalize_weights(const WeightMaps& weights, double epsilon);

// Per-pixel weighted sum computed in linear light, then re-encoded. Pixels
// whose normalized weights sum below 0.5 fall back to a uniform average.
SrgbImage fuse_flat(const ExposureStack& stack, const WeightMaps& weights);

// Standard multi-scale blend: gaussian pyramids of the weights against
// laplacian pyramids of the linear frames, summed per level, collapsed,
// clipped, and encoded. depth 0 selects the default depth.
SrgbImage fuse_pyramid(const ExposureStack& stack, const WeightMaps& weights, int depth);

// Compute weights for the named engine, normalize, fuse (pyramid mode for
// mertens/gradient, flat for flat-weighted), and record provenance.
FusionCandidate run_engine(const ExposureStack& stack, const std::string& engine, const FusionConfig& cfg);

// Order-independent accumulation: sorts the terms in place by value before
// adding, so any permutation of the inputs produces the bit-identical sum.
// Used for every reduction across stack frames.
double stable_sum(std::span<double> terms);

}  // namespace mefgen
