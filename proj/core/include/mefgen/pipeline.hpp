#pragma once

#include "mefgen/dataset.hpp"
#include "mefgen/ensemble.hpp"
#include "mefgen/scoring.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mefgen {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Batch configuration, loadable from a plain key-value text file. CLI flags
// override file values; the effective config is snapshotted into out_dir.
struct PipelineConfig {
    EnsembleConfig ensemble;
    std::vector<double> evs = default_evs();
    std::vector<std::string> metrics = {"niqe"};  // metric tokens; "ext:<command>" for adapters
    std::string niqe_model_path;
    std::string brisque_model_path;  // empty = built-in fallback regressor
    Polarity external_polarity = Polarity::higher_better;
    double scorer_timeout_seconds = 60.0;
    int max_parallel_scorers = 4;
    Pairing pairing = Pairing::all_frames;
    int workers = 0;  // 0 = logical CPU count
};

// `key = value` lines; '#' starts a comment. Unknown keys are errors.
PipelineConfig load_config(const std::filesystem::path& path);
// Parse from preloaded text (used for snapshots and tests).
PipelineConfig parse_config(const std::string& text, const std::string& origin = "<string>");
// Render the effective config back to the same key-value format.
std::string dump_config(const PipelineConfig& cfg);

// Build scorers for the configured metric tokens. "niqe" needs a model file;
// "brisque" loads a regressor or falls back; "ext:<command>" wraps the
// external adapter. Throws ConfigError on unknown tokens.
ScorerList make_scorers(const PipelineConfig& cfg);
Scorer make_scorer(const std::string& token, const PipelineConfig& cfg);

struct SourceOutcome {
    std::string source_id;
    bool accepted = false;
    std::string reject_reason;
    double gate_score = 0.0;
    std::vector<DatasetRecord> records;
    std::string error;  // non-empty = processing failed outright
};

struct PipelineReport {
    std::vector<SourceOutcome> outcomes;  // in source order
    CalibrationResult calibration;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t failed = 0;
};

// End-to-end batch: render an MES per source, calibrate engines over the
// corpus, generate/select/gate pseudo-GTs, and emit records. Deterministic
// for a fixed seed regardless of worker count: every source draws its
// randomness from hash(seed, source_id).
PipelineReport run_pipeline(const std::vector<std::filesystem::path>& sources,
                            const std::filesystem::path& out_dir, const PipelineConfig& cfg);

// Collect the accepted records (in source order) from a report.
std::vector<DatasetRecord> collect_records(const PipelineReport& report);

// Deterministic parallel map: fn(i) runs once per index on a pool of
// `workers` threads; exceptions are captured per index.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace mefgen
