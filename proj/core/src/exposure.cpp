#include "mefgen/exposure.hpp"

#include "mefgen/color.hpp"

#include <algorithm>
#include <cmath>

namespace mefgen {

namespace {

SrgbImage encode_with_gain(const LinearImage& linear, double gain) {
    SrgbImage out(linear.width, linear.height);
    for (std::size_t i = 0; i < linear.data.size(); ++i) {
        out.data[i] = srgb_encode_value(static_cast<double>(linear.data[i]) * gain);
    }
    return out;
}

double mean_at_gain(const LinearImage& linear, double gain) {
    return mean_intensity(encode_with_gain(linear, gain));
}

}  // namespace

ExposureStack make_stack(std::vector<SrgbImage> frames, std::vector<double> evs, std::string source_id) {
    if (frames.size() != evs.size()) {
        throw ExposureError("frame and EV counts differ");
    }
    if (frames.size() < 2) {
        throw ExposureError("an exposure stack needs at least 2 frames");
    }
    for (const SrgbImage& f : frames) {
        validate(f);
        if (f.width != frames.front().width || f.height != frames.front().height) {
            throw ExposureError("all stack frames must share dimensions");
        }
    }
    for (std::size_t i = 1; i < evs.size(); ++i) {
        if (!(evs[i] > evs[i - 1])) {
            throw ExposureError("exposure values must be strictly increasing");
        }
    }
    ExposureStack stack;
    stack.frames = std::move(frames);
    stack.evs = std::move(evs);
    stack.source_id = std::move(source_id);
    return stack;
}

SrgbImage render_ev(const LinearImage& img, double ev) {
    return encode_with_gain(img, std::exp2(ev));
}

ExposureStack render_mes(const LinearImage& img, const std::vector<double>& evs, std::string source_id) {
    if (evs.empty()) {
        throw ExposureError("EV list must not be empty");
    }
    std::vector<double> sorted = evs;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            throw ExposureError("duplicate exposure value " + std::to_string(sorted[i]));
        }
    }
    std::vector<SrgbImage> frames;
    frames.reserve(sorted.size());
    for (double ev : sorted) {
        frames.push_back(render_ev(img, ev));
    }
    return make_stack(std::move(frames), std::move(sorted), std::move(source_id));
}

RetargetResult retarget_exposure(const SrgbImage& img, StyleCode target) {
    validate(img);
    if (!(target.z > 0.0 && target.z < 1.0)) {
        throw ExposureError("style code must lie in (0,1)");
    }
    if (mean_intensity(img) <= 0.0) {
        throw ExposureError("zero-intensity input cannot be retargeted");
    }
    const LinearImage linear = srgb_decode(img);

    constexpr double kTolerance = 1e-3;
    constexpr int kMaxIterations = 40;
    double lo = std::exp2(-10.0);
    double hi = std::exp2(10.0);

    // track the best gain seen, so an unreachable target still returns the
    // closest boundary result
    double best_gain = 1.0;
    double best_err = std::abs(mean_at_gain(linear, 1.0) - target.z);

    auto consider = [&](double gain, double mean) {
        const double err = std::abs(mean - target.z);
        if (err < best_err) {
            best_err = err;
            best_gain = gain;
        }
    };

    const double mean_lo = mean_at_gain(linear, lo);
    const double mean_hi = mean_at_gain(linear, hi);
    consider(lo, mean_lo);
    consider(hi, mean_hi);

    if (mean_lo < target.z && mean_hi > target.z && best_err > kTolerance) {
        // bisect in log2(gain); gain -> mean is monotone non-decreasing
        double llo = -10.0, lhi = 10.0;
        for (int it = 0; it < kMaxIterations && best_err > kTolerance; ++it) {
            const double lmid = 0.5 * (llo + lhi);
            const double gain = std::exp2(lmid);
            const double mean = mean_at_gain(linear, gain);
            consider(gain, mean);
            if (mean < target.z) {
                llo = lmid;
            } else {
                lhi = lmid;
            }
        }
    }

    RetargetResult result;
    result.gain = best_gain;
    result.image = encode_with_gain(linear, best_gain);
    result.target_reached = best_err <= kTolerance;
    return result;
}

ExposureStack synthesize_mes(const SrgbImage& img, const std::vector<StyleCode>& targets, std::string source_id) {
    for (std::size_t i = 1; i < targets.size(); ++i) {
        if (!(targets[i].z > targets[i - 1].z)) {
            throw ExposureError("style targets must be sorted strictly ascending");
        }
    }
    std::vector<SrgbImage> frames;
    std::vector<double> evs;
    frames.reserve(targets.size());
    evs.reserve(targets.size());
    for (StyleCode target : targets) {
        RetargetResult r = retarget_exposure(img, target);
        frames.push_back(std::move(r.image));
        evs.push_back(std::log2(r.gain));
    }
    return make_stack(std::move(frames), std::move(evs), std::move(source_id));
}

}  // namespace mefgen
