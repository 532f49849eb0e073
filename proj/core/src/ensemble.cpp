#include "mefgen/ensemble.hpp"

#include "mefgen/color.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mefgen {

namespace {

std::vector<std::size_t> ev_class(const ExposureStack& stack, int sign) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < stack.evs.size(); ++i) {
        const double ev = stack.evs[i];
        const bool is_zero = std::abs(ev) < kEvZeroTolerance;
        if ((sign == 0 && is_zero) || (sign < 0 && !is_zero && ev < 0) || (sign > 0 && !is_zero && ev > 0)) {
            idx.push_back(i);
        }
    }
    return idx;
}

// blend engine results pixel-wise in linear light
SrgbImage blend_images(const std::vector<const SrgbImage*>& images, const std::vector<double>& weights) {
    std::vector<LinearImage> linear;
    linear.reserve(images.size());
    for (const SrgbImage* img : images) {
        linear.push_back(srgb_decode(*img));
    }
    SrgbImage out(images.front()->width, images.front()->height);
    std::vector<double> terms(images.size());
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        for (std::size_t j = 0; j < linear.size(); ++j) {
            terms[j] = weights[j] * static_cast<double>(linear[j].data[i]);
        }
        out.data[i] = srgb_encode_value(stable_sum(terms));
    }
    return out;
}

}  // namespace

ExposureStack pick_triplet(const ExposureStack& stack, Rng& rng) {
    const std::vector<std::size_t> neg = ev_class(stack, -1);
    const std::vector<std::size_t> zero = ev_class(stack, 0);
    const std::vector<std::size_t> pos = ev_class(stack, +1);
    if (neg.empty() || zero.empty() || pos.empty()) {
        throw EnsembleError("stack lacks EV sign coverage (" + stack.source_id + ")");
    }
    const std::size_t i_neg = neg[rng.below(neg.size())];
    const std::size_t i_zero = zero[rng.below(zero.size())];
    const std::size_t i_pos = pos[rng.below(pos.size())];
    return make_stack({stack.frames[i_neg], stack.frames[i_zero], stack.frames[i_pos]},
                      {stack.evs[i_neg], stack.evs[i_zero], stack.evs[i_pos]}, stack.source_id);
}

CalibrationResult calibrate_engine_scores(const std::vector<ExposureStack>& stacks, const EnsembleConfig& cfg,
                                          const Scorer& primary_metric) {
    if (stacks.empty()) {
        throw EnsembleError("calibration needs at least one stack");
    }
    if (cfg.engines.empty()) {
        throw EnsembleError("calibration needs at least one engine");
    }
    CalibrationResult result;
    for (const std::string& engine : cfg.engines) {
        result.win_counts.emplace_back(engine, 0);
    }
    for (int g = 0; g < cfg.calibration_groups; ++g) {
        // one independent stream per group, so worker scheduling cannot
        // change what any group sees
        Rng rng(derive_seed(cfg.rng_seed, "calib/" + std::to_string(g)));
        try {
            const ExposureStack& stack = stacks[rng.below(stacks.size())];
            const ExposureStack triplet = pick_triplet(stack, rng);
            std::size_t best = 0;
            double best_score = 0.0;
            bool have_best = false;
            for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
                const FusionCandidate cand = run_engine(triplet, cfg.engines[e], cfg.fusion);
                const double score = primary_metric.eval(cand.image);
                if (!have_best || score_better(primary_metric.polarity, score, best_score)) {
                    best = e;
                    best_score = score;
                    have_best = true;
                }
            }
            result.win_counts[best].second += 1;
            result.groups_run += 1;
        } catch (const std::exception& e) {
            result.groups_skipped += 1;
            result.failures.push_back("group " + std::to_string(g) + ": " + e.what());
        }
    }
    return result;
}

std::vector<FusionCandidate> generate_candidates(const ExposureStack& stack, const CalibrationResult& calib,
                                                 const EnsembleConfig& cfg, Rng& rng) {
    if (cfg.blend_pick < 1 || static_cast<std::size_t>(cfg.blend_pick) > cfg.engines.size()) {
        throw EnsembleError("blend_pick must lie in [1, engine count]");
    }
    if (cfg.n_blends < 0) {
        throw EnsembleError("n_blends must be >= 0");
    }
    // win count lookup in engine order
    std::vector<double> counts(cfg.engines.size(), 0.0);
    for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
        for (const auto& [name, wins] : calib.win_counts) {
            if (name == cfg.engines[e]) {
                counts[e] = static_cast<double>(wins);
            }
        }
    }

    const ExposureStack triplet = pick_triplet(stack, rng);
    std::vector<FusionCandidate> pool;
    pool.reserve(cfg.engines.size() + cfg.n_blends);
    for (const std::string& engine : cfg.engines) {
        pool.push_back(run_engine(triplet, engine, cfg.fusion));
    }
    const std::size_t engine_count = cfg.engines.size();

    std::vector<std::size_t> indices(engine_count);
    for (int b = 0; b < cfg.n_blends; ++b) {
        // pick blend_pick engine results uniformly without replacement
        std::iota(indices.begin(), indices.end(), 0);
        for (int k = 0; k < cfg.blend_pick; ++k) {
            const std::size_t swap_with = k + rng.below(engine_count - k);
            std::swap(indices[k], indices[swap_with]);
        }
        std::vector<std::size_t> picked(indices.begin(), indices.begin() + cfg.blend_pick);
        std::sort(picked.begin(), picked.end());  // provenance in engine list order

        std::vector<double> weights(picked.size());
        double total = 0.0;
        for (std::size_t k = 0; k < picked.size(); ++k) {
            weights[k] = counts[picked[k]];
            total += weights[k];
        }
        if (total <= 0.0) {
            std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(picked.size()));
        } else {
            for (double& w : weights) {
                w /= total;
            }
        }

        std::vector<const SrgbImage*> images;
        FusionCandidate cand;
        for (std::size_t k = 0; k < picked.size(); ++k) {
            images.push_back(&pool[picked[k]].image);
            cand.provenance.emplace_back(cfg.engines[picked[k]], weights[k]);
        }
        cand.image = blend_images(images, weights);
        cand.triplet_evs = triplet.evs;
        pool.push_back(std::move(cand));
    }
    return pool;
}

SelectionResult select_pseudo_gt(std::vector<FusionCandidate>& candidates, const ScorerList& metrics) {
    if (candidates.empty()) {
        throw EnsembleError("no candidates to select from");
    }
    if (metrics.empty()) {
        throw EnsembleError("selection needs at least one metric");
    }
    SelectionResult result;
    std::vector<std::size_t> scorable;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool ok = true;
        for (const Scorer& metric : metrics) {
            if (candidates[i].scores.count(metric.name)) continue;
            try {
                candidates[i].scores[metric.name] = metric.score(candidates[i].image);
            } catch (const std::exception& e) {
                result.excluded.emplace_back(i, std::string(metric.name) + ": " + e.what());
                ok = false;
                break;
            }
        }
        if (ok) {
            scorable.push_back(i);
        }
    }
    if (scorable.empty()) {
        throw EnsembleError("no scorable candidates");
    }

    // rank per metric: 1 = best respecting polarity, ties by candidate index
    std::map<std::size_t, double> rank_sum;
    for (const Scorer& metric : metrics) {
        std::vector<std::size_t> order = scorable;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = candidates[a].scores.at(metric.name).value;
            const double vb = candidates[b].scores.at(metric.name).value;
            if (va != vb) return score_better(metric.polarity, va, vb);
            return false;  // stable sort keeps index order on ties
        });
        for (std::size_t r = 0; r < order.size(); ++r) {
            rank_sum[order[r]] += static_cast<double>(r + 1);
            candidates[order[r]].rank_stats[metric.name] = static_cast<double>(r + 1);
        }
    }

    const Scorer& first = metrics.front();
    std::size_t winner = scorable.front();
    for (std::size_t i : scorable) {
        const double mean_i = rank_sum[i] / static_cast<double>(metrics.size());
        const double mean_w = rank_sum[winner] / static_cast<double>(metrics.size());
        if (mean_i < mean_w) {
            winner = i;
        } else if (mean_i == mean_w && i != winner) {
            const double vi = candidates[i].scores.at(first.name).value;
            const double vw = candidates[winner].scores.at(first.name).value;
            if (score_better(first.polarity, vi, vw)) {
                winner = i;  // lower index already wins plain ties
            }
        }
    }
    result.winner_index = winner;
    return result;
}

GateDecision quality_gate(const FusionCandidate& candidate, const Scorer& quality_scorer, double threshold) {
    GateDecision decision;
    double value = 0.0;
    try {
        const auto it = candidate.scores.find(quality_scorer.name);
        value = it != candidate.scores.end() ? it->second.value : quality_scorer.eval(candidate.image);
    } catch (const std::exception& e) {
        decision.keep = false;
        decision.reason = std::string("quality scorer unavailable: ") + e.what();
        return decision;
    }
    decision.score = value;
    const bool fails = quality_scorer.polarity == Polarity::higher_better ? value < threshold : value > threshold;
    if (fails) {
        decision.keep = false;
        decision.reason = "quality score " + std::to_string(value) + " fails threshold " + std::to_string(threshold);
    }
    return decision;
}

}  // namespace mefgen
