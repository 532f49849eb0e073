#pragma once

#include "mefgen/ensemble.hpp"
#include "mefgen/exposure.hpp"
#include "mefgen/fusion.hpp"
#include "mefgen/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mefgen {

struct DatasetError : std::runtime_error {
    explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// One input/pseudo-GT training pair. Paths are relative to the dataset root
// (the manifest's directory), so manifests stay relocatable and re-runs into
// different directories produce identical bytes.
struct DatasetRecord {
    std::string source_id;
    std::string input_path;
    double input_ev = 0.0;
    std::string pseudo_gt_path;
    std::map<std::string, double> scores;
    std::string provenance;
    std::uint64_t seed = 0;

    bool operator==(const DatasetRecord&) const = default;
};

enum class Pairing { all_frames, random_frame };

// Write the pseudo-GT once under out_dir/gt/<source_id>/ and the chosen
// input frames under out_dir/input/<source_id>/, one record per input frame.
// All-frames pairing keeps every MES frame; random-frame keeps one.
std::vector<DatasetRecord> emit_records(const ExposureStack& stack, const FusionCandidate& pseudo_gt,
                                        const std::filesystem::path& out_dir, Pairing pairing, Rng& rng,
                                        std::uint64_t seed);

// Manifest is newline-delimited JSON, one record per line, UTF-8, keys
// exactly matching the DatasetRecord fields. read is the total inverse of
// write; malformed lines report their line number.
void write_manifest(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);
std::vector<DatasetRecord> read_manifest(const std::filesystem::path& path);

struct CorpusStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::array<std::uint64_t, 64> intensity_histogram{};  // mean intensity of inputs, bins over [0,1]
    // per metric: p5 p25 p50 p75 p95
    std::map<std::string, std::array<double, 5>> score_quantiles;
};

// Histogram over the input frames' mean intensities plus score quantiles.
// Loads every input image named by the records, resolved against base_dir.
CorpusStats corpus_stats(const std::vector<DatasetRecord>& records, const std::filesystem::path& base_dir,
                         std::uint64_t rejected_count = 0);

// Plain-text table of the stats; CSV form for machine consumption.
std::string format_stats(const CorpusStats& stats);
std::string stats_csv(const CorpusStats& stats);

// Deterministic frame file name: <source_id>_ev<+N.NN>.png
std::string frame_file_name(const std::string& source_id, double ev);

}  // namespace mefgen
