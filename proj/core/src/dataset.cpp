#include "mefgen/dataset.hpp"

#include "mefgen/color.hpp"
#include "mefgen/png_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mefgen {

namespace {

using nlohmann::json;

json record_to_json(const DatasetRecord& r) {
    json j;
    j["source_id"] = r.source_id;
    j["input_path"] = r.input_path;
    j["input_ev"] = r.input_ev;
    j["pseudo_gt_path"] = r.pseudo_gt_path;
    j["scores"] = r.scores;
    j["provenance"] = r.provenance;
    j["seed"] = r.seed;
    return j;
}

DatasetRecord record_from_json(const json& j) {
    DatasetRecord r;
    r.source_id = j.at("source_id").get<std::string>();
    r.input_path = j.at("input_path").get<std::string>();
    r.input_ev = j.at("input_ev").get<double>();
    r.pseudo_gt_path = j.at("pseudo_gt_path").get<std::string>();
    r.scores = j.at("scores").get<std::map<std::string, double>>();
    r.provenance = j.at("provenance").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

// nearest-rank with linear interpolation on the sorted sample
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::string frame_file_name(const std::string& source_id, double ev) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_ev%+.2f.png", ev);
    return source_id + buf;
}

std::vector<DatasetRecord> emit_records(const ExposureStack& stack, const FusionCandidate& pseudo_gt,
                                        const std::filesystem::path& out_dir, Pairing pairing, Rng& rng,
                                        std::uint64_t seed) {
    const std::filesystem::path gt_dir = out_dir / "gt" / stack.source_id;
    const std::filesystem::path input_dir = out_dir / "input" / stack.source_id;
    std::error_code ec;
    std::filesystem::create_directories(gt_dir, ec);
    std::filesystem::create_directories(input_dir, ec);
    if (!std::filesystem::is_directory(gt_dir) || !std::filesystem::is_directory(input_dir)) {
        throw DatasetError("cannot create output directories under " + out_dir.string());
    }

    // record paths relative to out_dir; manifests must stay relocatable
    const std::filesystem::path gt_rel = std::filesystem::path("gt") / stack.source_id / (stack.source_id + "_gt.png");
    save_image(out_dir / gt_rel, pseudo_gt.image);

    std::map<std::string, double> scores;
    for (const auto& [name, score] : pseudo_gt.scores) {
        scores[name] = score.value;
    }
    const std::string provenance = pseudo_gt.provenance_string();

    std::vector<std::size_t> selected;
    if (pairing == Pairing::all_frames) {
        selected.resize(stack.size());
        for (std::size_t i = 0; i < selected.size(); ++i) {
            selected[i] = i;
        }
    } else {
        selected.push_back(rng.below(stack.size()));
    }

    std::vector<DatasetRecord> records;
    records.reserve(selected.size());
    for (std::size_t i : selected) {
        const std::filesystem::path input_rel =
            std::filesystem::path("input") / stack.source_id / frame_file_name(stack.source_id, stack.evs[i]);
        save_image(out_dir / input_rel, stack.frames[i]);
        DatasetRecord r;
        r.source_id = stack.source_id;
        r.input_path = input_rel.generic_string();
        r.input_ev = stack.evs[i];
        r.pseudo_gt_path = gt_rel.generic_string();
        r.scores = scores;
        r.provenance = provenance;
        r.seed = seed;
        records.push_back(std::move(r));
    }
    return records;
}

void write_manifest(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DatasetError(path.string() + ": cannot open for writing");
    }
    for (const DatasetRecord& r : records) {
        out << record_to_json(r).dump() << "\n";
    }
    if (!out) {
        throw DatasetError(path.string() + ": write failed");
    }
}

std::vector<DatasetRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DatasetError(path.string() + ": cannot open for reading");
    }
    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw DatasetError(path.string() + ": malformed record at line " + std::to_string(line_no) + ": " +
                               e.what());
        }
    }
    return records;
}

CorpusStats corpus_stats(const std::vector<DatasetRecord>& records, const std::filesystem::path& base_dir,
                         std::uint64_t rejected_count) {
    CorpusStats stats;
    stats.rejected = rejected_count;
    std::map<std::string, std::vector<double>> by_metric;
    for (const DatasetRecord& r : records) {
        const SrgbImage input = load_srgb(base_dir / r.input_path);
        const double mean = mean_intensity(input);
        const int bin = std::min(static_cast<int>(mean * 64.0), 63);
        stats.intensity_histogram[bin] += 1;
        stats.accepted += 1;
        for (const auto& [name, value] : r.scores) {
            by_metric[name].push_back(value);
        }
    }
    for (auto& [name, values] : by_metric) {
        std::sort(values.begin(), values.end());
        stats.score_quantiles[name] = {quantile(values, 0.05), quantile(values, 0.25), quantile(values, 0.50),
                                       quantile(values, 0.75), quantile(values, 0.95)};
    }
    return stats;
}

std::string format_stats(const CorpusStats& stats) {
    std::ostringstream os;
    os << "records accepted: " << stats.accepted << "\n";
    os << "sources rejected: " << stats.rejected << "\n";
    std::uint64_t peak = 1;
    int nonzero = 0;
    for (std::uint64_t c : stats.intensity_histogram) {
        peak = std::max(peak, c);
        nonzero += c > 0;
    }
    os << "mean-intensity histogram (64 bins over [0,1], " << nonzero << " non-empty):\n";
    for (int i = 0; i < 64; ++i) {
        const double lo = i / 64.0;
        const int bar = static_cast<int>(std::lround(40.0 * static_cast<double>(stats.intensity_histogram[i]) /
                                                     static_cast<double>(peak)));
        char label[16];
        std::snprintf(label, sizeof(label), "%.3f", lo);
        os << "  " << label << " | " << std::string(bar, '#') << " " << stats.intensity_histogram[i] << "\n";
    }
    if (!stats.score_quantiles.empty()) {
        os << "score quantiles (p5 p25 p50 p75 p95):\n";
        for (const auto& [name, q] : stats.score_quantiles) {
            os << "  " << name << ":";
            for (double v : q) {
                os << " " << v;
            }
            os << "\n";
        }
    }
    return os.str();
}

std::string stats_csv(const CorpusStats& stats) {
    std::ostringstream os;
    os << "key,value\n";
    os << "accepted," << stats.accepted << "\n";
    os << "rejected," << stats.rejected << "\n";
    for (int i = 0; i < 64; ++i) {
        os << "hist_bin_" << i << "," << stats.intensity_histogram[i] << "\n";
    }
    for (const auto& [name, q] : stats.score_quantiles) {
        const char* labels[5] = {"p5", "p25", "p50", "p75", "p95"};
        for (int i = 0; i < 5; ++i) {
            os << name << "_" << labels[i] << "," << q[i] << "\n";
        }
    }
    return os.str();
}

}  // namespace mefgen
