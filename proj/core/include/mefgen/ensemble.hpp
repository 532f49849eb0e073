#pragma once

#include "mefgen/exposure.hpp"
#include "mefgen/fusion.hpp"
#include "mefgen/rng.hpp"
#include "mefgen/scoring.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mefgen {

struct EnsembleError : std::runtime_error {
    explicit EnsembleError(const std::string& what) : std::runtime_error(what) {}
};

struct EnsembleConfig {
    std::vector<std::string> engines = builtin_engines();
    int n_blends = 10;
    int blend_pick = 3;
    int calibration_groups = 1000;
    std::uint64_t rng_seed = 0;
    // gate disabled while quality_metric is empty
    std::string quality_metric;
    double quality_threshold = 0.5;
    FusionConfig fusion;
};

// Frames within a quarter stop of EV 0 count as the zero class; synthesized
// stacks carry non-integer EV labels.
inline constexpr double kEvZeroTolerance = 0.25;

// One frame per EV sign class (negative, zero, positive), sampled uniformly.
// The result is a 3-frame stack ordered by EV.
ExposureStack pick_triplet(const ExposureStack& stack, Rng& rng);

struct CalibrationResult {
    // engine -> how often it ranked first, in engine list order
    std::vector<std::pair<std::string, int>> win_counts;
    int groups_run = 0;
    int groups_skipped = 0;
    std::vector<std::string> failures;  // one line per skipped group
};

// Run every engine on sampled triplets and count which ranks first under the
// primary (first-listed) metric. Failed groups are skipped and reported.
CalibrationResult calibrate_engine_scores(const std::vector<ExposureStack>& stacks, const EnsembleConfig& cfg,
                                          const Scorer& primary_metric);

// Candidate pool for one source: each engine applied to one sampled triplet,
// plus n_blends random score-weighted blends of blend_pick engine results.
// All-zero win counts fall back to uniform blend weights.
std::vector<FusionCandidate> generate_candidates(const ExposureStack& stack, const CalibrationResult& calib,
                                                 const EnsembleConfig& cfg, Rng& rng);

struct SelectionResult {
    std::size_t winner_index = 0;
    // candidates that could not be scored, with reasons
    std::vector<std::pair<std::size_t, std::string>> excluded;
};

// Rank candidates per metric (1 = best respecting polarity); the winner has
// the lowest mean rank. Ties break on the first metric's raw score, then
// candidate index. Scoring failures exclude the candidate, not the image.
SelectionResult select_pseudo_gt(std::vector<FusionCandidate>& candidates, const ScorerList& metrics);

struct GateDecision {
    bool keep = true;
    double score = 0.0;
    std::string reason;  // set when rejected
};

// Threshold filter on the configured quality scorer. Rejects when the score
// fails the threshold respecting polarity (boundary value keeps); a scorer
// failure rejects conservatively.
GateDecision quality_gate(const FusionCandidate& candidate, const Scorer& quality_scorer, double threshold);

}  // namespace mefgen
