#pragma once

#include "mefgen/image.hpp"

#include <string>
#include <vector>

namespace mefgen {

struct ExposureError : std::runtime_error {
    explicit ExposureError(const std::string& what) : std::runtime_error(what) {}
};

// An MES: ordered set of tone-mapped 8-bit frames with EV labels in stops.
// Invariants: >= 2 frames, matching dimensions, strictly increasing EVs.
struct ExposureStack {
    std::vector<SrgbImage> frames;
    std::vector<double> evs;
    std::string source_id;

    std::size_t size() const { return frames.size(); }
};

// Validating constructor; throws ExposureError on invariant violation.
ExposureStack make_stack(std::vector<SrgbImage> frames, std::vector<double> evs, std::string source_id);

// Exposure-control knob: mean intensity of an sRGB image, in (0,1).
struct StyleCode {
    double z = 0.5;
};

inline const std::vector<double>& default_evs() {
    static const std::vector<double> evs = {-3, -2, -1, 0, +1, +2, +3};
    return evs;
}

inline const std::vector<StyleCode>& default_style_targets() {
    static const std::vector<StyleCode> targets = {{0.25}, {0.5}, {0.75}};
    return targets;
}

// Scale linear light by 2^ev and tone-map; clipping inside the encode
// realizes sensor saturation.
SrgbImage render_ev(const LinearImage& img, double ev);

// One render_ev per entry. EVs must be non-empty, sorted ascending, and free
// of duplicates.
ExposureStack render_mes(const LinearImage& img, const std::vector<double>& evs, std::string source_id);

struct RetargetResult {
    SrgbImage image;
    double gain = 1.0;           // linear-light multiplier applied
    bool target_reached = true;  // false when no gain in [2^-10, 2^10] hits the target
};

// Gain-space exposure retargeting: decode to linear, find the gain whose
// re-encoded mean intensity matches target.z within 1e-3 (bisection on the
// monotone gain->mean map, at most 40 iterations). All-black input is an
// error; an unreachable target returns the closest boundary result flagged.
RetargetResult retarget_exposure(const SrgbImage& img, StyleCode target);

// One retarget_exposure per target; EV labels are log2(gain) per frame, so
// they need not be integers. Targets must be sorted ascending.
ExposureStack synthesize_mes(const SrgbImage& img, const std::vector<StyleCode>& targets, std::string source_id);

}  // namespace mefgen
