#include "mefgen/iqa.hpp"

#include <cmath>
#include <vector>

namespace mefgen {

namespace {

constexpr double kAlphaMin = 0.2;
constexpr double kAlphaMax = 10.0;
constexpr double kAlphaStep = 1e-3;

// rho(alpha) = Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)), monotone in alpha
struct RhoGrid {
    std::vector<double> alpha;
    std::vector<double> rho;
};

const RhoGrid& rho_grid() {
    static const RhoGrid grid = [] {
        RhoGrid g;
        const int count = static_cast<int>(std::round((kAlphaMax - kAlphaMin) / kAlphaStep)) + 1;
        g.alpha.reserve(count);
        g.rho.reserve(count);
        for (int i = 0; i < count; ++i) {
            const double a = kAlphaMin + i * kAlphaStep;
            const double num = std::tgamma(2.0 / a);
            g.alpha.push_back(a);
            g.rho.push_back(num * num / (std::tgamma(1.0 / a) * std::tgamma(3.0 / a)));
        }
        return g;
    }();
    return grid;
}

}  // namespace

AggdFit fit_aggd(const std::vector<float>& samples) {
    if (samples.size() < 100) {
        throw IqaError("fit_aggd needs at least 100 samples");
    }
    std::size_t neg_count = 0, pos_count = 0;
    double neg_sq = 0.0, pos_sq = 0.0, abs_sum = 0.0;
    for (float v : samples) {
        const double x = v;
        if (x < 0.0) {
            ++neg_count;
            neg_sq += x * x;
        } else if (x > 0.0) {
            ++pos_count;
            pos_sq += x * x;
        }
        abs_sum += std::abs(x);
    }
    if (neg_count == 0 || pos_count == 0) {
        throw IqaError("insufficient variance");
    }
    const double n = static_cast<double>(samples.size());
    const double second_moment = (neg_sq + pos_sq) / n;
    if (second_moment <= 0.0) {
        throw IqaError("insufficient variance");
    }

    const double sigma_l = std::sqrt(neg_sq / static_cast<double>(neg_count));
    const double sigma_r = std::sqrt(pos_sq / static_cast<double>(pos_count));
    const double gamma_hat = sigma_l / sigma_r;
    const double r_hat = (abs_sum / n) * (abs_sum / n) / second_moment;
    const double g2 = gamma_hat * gamma_hat;
    const double r_norm = r_hat * (gamma_hat * g2 + 1.0) * (gamma_hat + 1.0) / ((g2 + 1.0) * (g2 + 1.0));

    const RhoGrid& grid = rho_grid();
    double best_diff = std::numeric_limits<double>::infinity();
    double best_alpha = grid.alpha.front();
    for (std::size_t i = 0; i < grid.alpha.size(); ++i) {
        const double diff = std::abs(grid.rho[i] - r_norm);
        if (diff < best_diff) {
            best_diff = diff;
            best_alpha = grid.alpha[i];
        }
    }
    return {best_alpha, sigma_l, sigma_r};
}

double aggd_mean(const AggdFit& fit) {
    return (fit.sigma_right - fit.sigma_left) * std::tgamma(2.0 / fit.alpha) / std::tgamma(1.0 / fit.alpha);
}

}  // namespace mefgen
