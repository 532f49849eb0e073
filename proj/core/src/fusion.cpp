#include "mefgen/fusion.hpp"

#include "mefgen/color.hpp"
#include "mefgen/pyramid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace mefgen {

namespace {

constexpr double kWellExposedSigma = 0.2;
constexpr double kWellExposedTarget = 0.5;
// below this normalized-weight sum a pixel counts as degenerate
constexpr double kDegenerateSum = 0.5;

// 0^0 := 1 so a zero exponent disables its criterion
inline double pow0(double base, double exponent) {
    if (exponent == 0.0) return 1.0;
    if (exponent == 1.0) return base;
    return std::pow(base, exponent);
}

inline double well_exposedness(double r, double g, double b) {
    const double inv = 1.0 / (2.0 * kWellExposedSigma * kWellExposedSigma);
    const double dr = r - kWellExposedTarget;
    const double dg = g - kWellExposedTarget;
    const double db = b - kWellExposedTarget;
    return std::exp(-(dr * dr + dg * dg + db * db) * inv);
}

// narrow to float without ever rounding up
inline float narrow_down(double x) {
    float f = static_cast<float>(x);
    if (static_cast<double>(f) > x) {
        f = std::nextafterf(f, 0.0f);
    }
    return f;
}

// narrow to float without ever rounding down
inline float narrow_up(double x) {
    float f = static_cast<float>(x);
    if (static_cast<double>(f) < x) {
        f = std::nextafterf(f, std::numeric_limits<float>::infinity());
    }
    return f;
}

void check_stack_weights(const ExposureStack& stack, const WeightMaps& weights, bool want_normalized) {
    if (weights.maps.size() != stack.size()) {
        throw FusionError("weight map count does not match stack frame count");
    }
    for (const GrayImage& m : weights.maps) {
        if (m.width != stack.frames.front().width || m.height != stack.frames.front().height) {
            throw FusionError("weight map dimensions do not match stack frames");
        }
    }
    if (want_normalized && !weights.normalized) {
        throw FusionError("weights must be normalized before fusing");
    }
}

std::vector<LinearImage> decode_stack(const ExposureStack& stack) {
    std::vector<LinearImage> linear;
    linear.reserve(stack.size());
    for (const SrgbImage& f : stack.frames) {
        linear.push_back(srgb_decode(f));
    }
    return linear;
}

// Substitute uniform weights wherever the normalized sum collapsed to ~0
// (normalization leaves all-zero pixels all-zero).
std::vector<GrayImage> patch_degenerate(const WeightMaps& weights) {
    const std::size_t n = weights.maps.size();
    std::vector<GrayImage> patched = weights.maps;
    const float uniform = narrow_down(1.0 / static_cast<double>(n));
    std::vector<double> terms(n);
    const std::size_t pixels = patched.front().pixel_count();
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            terms[j] = patched[j].data[i];
        }
        if (stable_sum(terms) < kDegenerateSum) {
            for (std::size_t j = 0; j < n; ++j) {
                patched[j].data[i] = uniform;
            }
        }
    }
    return patched;
}

}  // namespace

double stable_sum(std::span<double> terms) {
    // insertion sort; frame counts are tiny and this sits in per-pixel loops
    for (std::size_t i = 1; i < terms.size(); ++i) {
        const double v = terms[i];
        std::size_t j = i;
        while (j > 0 && terms[j - 1] > v) {
            terms[j] = terms[j - 1];
            --j;
        }
        terms[j] = v;
    }
    double acc = 0.0;
    for (double t : terms) {
        acc += t;
    }
    return acc;
}

std::string FusionCandidate::provenance_string() const {
    std::ostringstream os;
    if (provenance.size() == 1) {
        os << provenance.front().first;
    } else {
        os << "blend(";
        for (std::size_t i = 0; i < provenance.size(); ++i) {
            if (i) os << ",";
            os << provenance[i].first << ":" << provenance[i].second;
        }
        os << ")";
    }
    if (!triplet_evs.empty()) {
        os << " evs[";
        for (std::size_t i = 0; i < triplet_evs.size(); ++i) {
            if (i) os << ",";
            os << triplet_evs[i];
        }
        os << "]";
    }
    return os.str();
}

WeightMaps mertens_weights(const ExposureStack& stack, const FusionConfig& cfg) {
    if (cfg.contrast_exponent < 0 || cfg.saturation_exponent < 0 || cfg.well_exposedness_exponent < 0) {
        throw FusionError("weight exponents must be non-negative");
    }
    if (cfg.contrast_exponent == 0 && cfg.saturation_exponent == 0 && cfg.well_exposedness_exponent == 0) {
        throw FusionError("at least one weight exponent must be positive");
    }
    WeightMaps out;
    out.normalized = false;
    out.maps.reserve(stack.size());
    for (const SrgbImage& frame : stack.frames) {
        const int w = frame.width, h = frame.height;
        const GrayImage luma = luminance(frame);
        GrayImage map(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                // 4-neighbour Laplacian, clamp-to-edge
                const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
                const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
                const double lap = static_cast<double>(luma.at(xm, y)) + luma.at(xp, y) + luma.at(x, ym) +
                                   luma.at(x, yp) - 4.0 * luma.at(x, y);
                const double contrast = std::abs(lap);

                const double r = frame.at(x, y, 0) / 255.0;
                const double g = frame.at(x, y, 1) / 255.0;
                const double b = frame.at(x, y, 2) / 255.0;
                const double mean = (r + g + b) / 3.0;
                const double var = ((r - mean) * (r - mean) + (g - mean) * (g - mean) + (b - mean) * (b - mean)) / 3.0;
                const double saturation = std::sqrt(var);

                const double weight = pow0(contrast, cfg.contrast_exponent) *
                                      pow0(saturation, cfg.saturation_exponent) *
                                      pow0(well_exposedness(r, g, b), cfg.well_exposedness_exponent);
                map.at(x, y) = static_cast<float>(weight);
            }
        }
        out.maps.push_back(std::move(map));
    }
    return out;
}

WeightMaps gradient_weights(const ExposureStack& stack, const FusionConfig& cfg) {
    (void)cfg;
    WeightMaps out;
    out.normalized = false;
    out.maps.reserve(stack.size());
    for (const SrgbImage& frame : stack.frames) {
        const int w = frame.width, h = frame.height;
        const GrayImage luma = luminance(frame);
        GrayImage map(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                // forward differences; clamp-to-edge makes the last row/col 0
                const double gx = luma.at(std::min(x + 1, w - 1), y) - luma.at(x, y);
                const double gy = luma.at(x, std::min(y + 1, h - 1)) - luma.at(x, y);
                const double grad = std::sqrt(gx * gx + gy * gy);

                const double r = frame.at(x, y, 0) / 255.0;
                const double g = frame.at(x, y, 1) / 255.0;
                const double b = frame.at(x, y, 2) / 255.0;
                map.at(x, y) = static_cast<float>(grad * well_exposedness(r, g, b));
            }
        }
        out.maps.push_back(std::move(map));
    }
    return out;
}

WeightMaps normalize_weights(const WeightMaps& weights, double epsilon) {
    if (weights.maps.empty()) {
        throw FusionError("cannot normalize empty weight maps");
    }
    if (!(epsilon > 0.0)) {
        throw FusionError("epsilon must be positive");
    }
    const std::size_t n = weights.maps.size();
    const std::size_t pixels = weights.maps.front().pixel_count();
    WeightMaps out;
    out.normalized = true;
    out.maps.assign(n, GrayImage(weights.maps.front().width, weights.maps.front().height));
    std::vector<double> terms(n), scratch(n);
    std::vector<float> narrowed(n);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            terms[j] = weights.maps[j].data[i];
        }
        scratch = terms;
        const double denom = stable_sum(scratch) + epsilon;
        // float storage cannot represent the exact ratios; round up, then
        // walk the sum back under 1 so both normalization bounds hold on
        // the stored values. Ties step together to stay permutation
        // equivariant.
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            narrowed[j] = narrow_up(terms[j] / denom);
            sum += narrowed[j];
        }
        for (int guard = 0; sum > 1.0 && guard < 64; ++guard) {
            const float peak = *std::max_element(narrowed.begin(), narrowed.end());
            sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (narrowed[j] == peak) {
                    narrowed[j] = std::nextafterf(narrowed[j], 0.0f);
                }
                sum += narrowed[j];
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            out.maps[j].data[i] = narrowed[j];
        }
    }
    return out;
}

SrgbImage fuse_flat(const ExposureStack& stack, const WeightMaps& weights) {
    check_stack_weights(stack, weights, true);
    const std::vector<LinearImage> linear = decode_stack(stack);
    const std::size_t n = stack.size();
    const std::size_t pixels = stack.frames.front().pixel_count();
    const double uniform = 1.0 / static_cast<double>(n);

    SrgbImage out(stack.frames.front().width, stack.frames.front().height);
    std::vector<double> w(n), scratch(n), terms(n);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w[j] = weights.maps[j].data[i];
        }
        scratch = w;
        if (stable_sum(scratch) < kDegenerateSum) {
            std::fill(w.begin(), w.end(), uniform);
        }
        for (int c = 0; c < 3; ++c) {
            for (std::size_t j = 0; j < n; ++j) {
                terms[j] = w[j] * static_cast<double>(linear[j].data[i * 3 + c]);
            }
            out.data[i * 3 + c] = srgb_encode_value(stable_sum(terms));
        }
    }
    return out;
}

SrgbImage fuse_pyramid(const ExposureStack& stack, const WeightMaps& weights, int depth) {
    check_stack_weights(stack, weights, true);
    const int w = stack.frames.front().width;
    const int h = stack.frames.front().height;
    if (depth <= 0) {
        depth = default_pyramid_depth(w, h);
    }
    const std::size_t n = stack.size();
    const std::vector<LinearImage> linear = decode_stack(stack);
    const std::vector<GrayImage> patched = patch_degenerate(weights);

    // per-frame pyramids: gaussian of weights, laplacian of each channel
    std::vector<Pyramid> weight_pyrs;
    weight_pyrs.reserve(n);
    std::vector<std::array<Pyramid, 3>> frame_pyrs(n);
    for (std::size_t j = 0; j < n; ++j) {
        weight_pyrs.push_back(gaussian_pyramid(patched[j], depth));
        for (int c = 0; c < 3; ++c) {
            GrayImage channel(w, h);
            for (std::size_t i = 0; i < channel.data.size(); ++i) {
                channel.data[i] = linear[j].data[i * 3 + c];
            }
            frame_pyrs[j][c] = laplacian_pyramid(channel, depth);
        }
    }

    SrgbImage out(w, h);
    std::vector<double> terms(n);
    for (int c = 0; c < 3; ++c) {
        Pyramid blended;
        blended.kind = PyramidKind::laplacian;
        blended.levels.reserve(depth);
        for (int k = 0; k < depth; ++k) {
            const GrayImage& shape = frame_pyrs[0][c].levels[k];
            GrayImage level(shape.width, shape.height);
            std::vector<const float*> wp(n), fp(n);
            for (std::size_t j = 0; j < n; ++j) {
                wp[j] = weight_pyrs[j].levels[k].data.data();
                fp[j] = frame_pyrs[j][c].levels[k].data.data();
            }
            for (std::size_t i = 0; i < level.data.size(); ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    terms[j] = static_cast<double>(wp[j][i]) * static_cast<double>(fp[j][i]);
                }
                level.data[i] = static_cast<float>(stable_sum(terms));
            }
            blended.levels.push_back(std::move(level));
        }
        const GrayImage fused = collapse(blended);
        for (std::size_t i = 0; i < fused.data.size(); ++i) {
            out.data[i * 3 + c] = srgb_encode_value(fused.data[i]);
        }
    }
    return out;
}

FusionCandidate run_engine(const ExposureStack& stack, const std::string& engine, const FusionConfig& cfg) {
    FusionCandidate candidate;
    if (engine == "mertens") {
        WeightMaps w = normalize_weights(mertens_weights(stack, cfg), cfg.epsilon);
        candidate.image = fuse_pyramid(stack, w, cfg.pyramid_depth);
    } else if (engine == "gradient") {
        WeightMaps w = normalize_weights(gradient_weights(stack, cfg), cfg.epsilon);
        candidate.image = fuse_pyramid(stack, w, cfg.pyramid_depth);
    } else if (engine == "flat-weighted") {
        WeightMaps w = normalize_weights(mertens_weights(stack, cfg), cfg.epsilon);
        candidate.image = fuse_flat(stack, w);
    } else {
        throw FusionError("unknown engine name: " + engine);
    }
    candidate.provenance = {{engine, 1.0}};
    candidate.triplet_evs = stack.evs;
    return candidate;
}

}  // namespace mefgen
