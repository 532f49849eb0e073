#include "mefgen/pipeline.hpp"

#include "mefgen/color.hpp"
#include "mefgen/iqa.hpp"
#include "mefgen/png_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mefgen {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (const std::string& part : split(s, ',')) {
        const std::string t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": \"" + v + "\"");
    }
}

long long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": \"" + v + "\"");
    }
}

std::vector<std::string> split_command(const std::string& s) {
    std::vector<std::string> argv;
    std::istringstream is(s);
    std::string word;
    while (is >> word) {
        argv.push_back(word);
    }
    return argv;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "engines") {
            cfg.ensemble.engines = split_list(value);
        } else if (key == "metrics") {
            cfg.metrics = split_list(value);
        } else if (key == "niqe_model") {
            cfg.niqe_model_path = value;
        } else if (key == "brisque_model") {
            cfg.brisque_model_path = value;
        } else if (key == "quality_metric") {
            cfg.ensemble.quality_metric = value;
        } else if (key == "quality_threshold") {
            cfg.ensemble.quality_threshold = parse_double(value, key);
        } else if (key == "n_blends") {
            cfg.ensemble.n_blends = static_cast<int>(parse_int(value, key));
        } else if (key == "blend_pick") {
            cfg.ensemble.blend_pick = static_cast<int>(parse_int(value, key));
        } else if (key == "calibration_groups") {
            cfg.ensemble.calibration_groups = static_cast<int>(parse_int(value, key));
        } else if (key == "rng_seed") {
            cfg.ensemble.rng_seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "evs") {
            cfg.evs.clear();
            for (const std::string& t : split_list(value)) {
                cfg.evs.push_back(parse_double(t, key));
            }
        } else if (key == "epsilon") {
            cfg.ensemble.fusion.epsilon = parse_double(value, key);
        } else if (key == "contrast_exponent") {
            cfg.ensemble.fusion.contrast_exponent = parse_double(value, key);
        } else if (key == "saturation_exponent") {
            cfg.ensemble.fusion.saturation_exponent = parse_double(value, key);
        } else if (key == "well_exposedness_exponent") {
            cfg.ensemble.fusion.well_exposedness_exponent = parse_double(value, key);
        } else if (key == "pyramid_depth") {
            cfg.ensemble.fusion.pyramid_depth = value == "auto" ? 0 : static_cast<int>(parse_int(value, key));
        } else if (key == "external_polarity") {
            if (value == "higher-better") {
                cfg.external_polarity = Polarity::higher_better;
            } else if (value == "lower-better") {
                cfg.external_polarity = Polarity::lower_better;
            } else {
                throw ConfigError("external_polarity must be higher-better or lower-better");
            }
        } else if (key == "scorer_timeout") {
            cfg.scorer_timeout_seconds = parse_double(value, key);
        } else if (key == "max_parallel_scorers") {
            cfg.max_parallel_scorers = static_cast<int>(parse_int(value, key));
        } else if (key == "pairing") {
            if (value == "all-frames") {
                cfg.pairing = Pairing::all_frames;
            } else if (value == "random-frame") {
                cfg.pairing = Pairing::random_frame;
            } else {
                throw ConfigError("pairing must be all-frames or random-frame");
            }
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_int(value, key));
        } else {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key \"" + key + "\"");
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string dump_config(const PipelineConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    auto join = [](const std::vector<std::string>& parts) {
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += parts[i];
        }
        return s;
    };
    os << "engines = " << join(cfg.ensemble.engines) << "\n";
    os << "metrics = " << join(cfg.metrics) << "\n";
    if (!cfg.niqe_model_path.empty()) os << "niqe_model = " << cfg.niqe_model_path << "\n";
    if (!cfg.brisque_model_path.empty()) os << "brisque_model = " << cfg.brisque_model_path << "\n";
    if (!cfg.ensemble.quality_metric.empty()) {
        os << "quality_metric = " << cfg.ensemble.quality_metric << "\n";
        os << "quality_threshold = " << cfg.ensemble.quality_threshold << "\n";
    }
    os << "n_blends = " << cfg.ensemble.n_blends << "\n";
    os << "blend_pick = " << cfg.ensemble.blend_pick << "\n";
    os << "calibration_groups = " << cfg.ensemble.calibration_groups << "\n";
    os << "rng_seed = " << cfg.ensemble.rng_seed << "\n";
    os << "evs = ";
    for (std::size_t i = 0; i < cfg.evs.size(); ++i) {
        os << (i ? "," : "") << cfg.evs[i];
    }
    os << "\n";
    os << "epsilon = " << cfg.ensemble.fusion.epsilon << "\n";
    os << "contrast_exponent = " << cfg.ensemble.fusion.contrast_exponent << "\n";
    os << "saturation_exponent = " << cfg.ensemble.fusion.saturation_exponent << "\n";
    os << "well_exposedness_exponent = " << cfg.ensemble.fusion.well_exposedness_exponent << "\n";
    os << "pyramid_depth = ";
    if (cfg.ensemble.fusion.pyramid_depth == 0) {
        os << "auto";
    } else {
        os << cfg.ensemble.fusion.pyramid_depth;
    }
    os << "\n";
    os << "external_polarity = " << to_string(cfg.external_polarity) << "\n";
    os << "scorer_timeout = " << cfg.scorer_timeout_seconds << "\n";
    os << "max_parallel_scorers = " << cfg.max_parallel_scorers << "\n";
    os << "pairing = " << (cfg.pairing == Pairing::all_frames ? "all-frames" : "random-frame") << "\n";
    os << "workers = " << cfg.workers << "\n";
    return os.str();
}

Scorer make_scorer(const std::string& token, const PipelineConfig& cfg) {
    if (token == "niqe") {
        if (cfg.niqe_model_path.empty()) {
            throw ConfigError("metric \"niqe\" requires niqe_model (fit one with fit-niqe)");
        }
        auto model = std::make_shared<NiqeModel>(load_niqe_model(cfg.niqe_model_path));
        return {"niqe", Polarity::lower_better,
                [model](const SrgbImage& img) { return niqe(img, *model).value; }};
    }
    if (token == "brisque") {
        auto reg = std::make_shared<BrisqueRegressor>(cfg.brisque_model_path.empty()
                                                          ? BrisqueRegressor::fallback()
                                                          : load_brisque_regressor(cfg.brisque_model_path));
        return {"brisque", Polarity::lower_better,
                [reg](const SrgbImage& img) { return brisque(img, *reg).value; }};
    }
    if (token.rfind("ext:", 0) == 0) {
        ExternalScorerConfig ext;
        ext.command = split_command(token.substr(4));
        if (ext.command.empty()) {
            throw ConfigError("empty external scorer command in \"" + token + "\"");
        }
        ext.metric_name = token;
        ext.polarity = cfg.external_polarity;
        ext.timeout_seconds = cfg.scorer_timeout_seconds;
        return {token, ext.polarity, [ext](const SrgbImage& img) { return external_score(img, ext).value; }};
    }
    throw ConfigError("unknown metric \"" + token + "\" (expected niqe, brisque, or ext:<command>)");
}

ScorerList make_scorers(const PipelineConfig& cfg) {
    if (cfg.metrics.empty()) {
        throw ConfigError("at least one metric must be configured");
    }
    ScorerList scorers;
    for (const std::string& token : cfg.metrics) {
        scorers.push_back(make_scorer(token, cfg));
    }
    return scorers;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
}

PipelineReport run_pipeline(const std::vector<std::filesystem::path>& sources,
                            const std::filesystem::path& out_dir, const PipelineConfig& cfg) {
    if (sources.empty()) {
        throw ConfigError("no source images to process");
    }
    set_external_scorer_parallelism(cfg.max_parallel_scorers);
    const ScorerList scorers = make_scorers(cfg);

    std::optional<Scorer> quality;
    if (!cfg.ensemble.quality_metric.empty()) {
        // reuse the configured metric when it is already in the list
        for (const Scorer& s : scorers) {
            if (s.name == cfg.ensemble.quality_metric) quality = s;
        }
        if (!quality) quality = make_scorer(cfg.ensemble.quality_metric, cfg);
    }

    PipelineReport report;
    report.outcomes.resize(sources.size());

    // stage 1: render stacks (parallel, deterministic per index)
    std::vector<ExposureStack> stacks(sources.size());
    std::vector<std::string> stack_errors(sources.size());
    parallel_for(sources.size(), cfg.workers, [&](std::size_t i) {
        const std::string source_id = sources[i].stem().string();
        report.outcomes[i].source_id = source_id;
        try {
            stacks[i] = render_mes(load_image(sources[i]), cfg.evs, source_id);
        } catch (const std::exception& e) {
            stack_errors[i] = e.what();
        }
    });

    std::vector<ExposureStack> usable;
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        if (stack_errors[i].empty()) {
            usable.push_back(stacks[i]);
        }
    }
    if (usable.empty()) {
        throw ConfigError("no readable source images");
    }

    // stage 2: engine calibration over the corpus, per-group seeded
    report.calibration = calibrate_engine_scores(usable, cfg.ensemble, scorers.front());

    // stage 3: per-source candidate generation, selection, gating, emission
    parallel_for(sources.size(), cfg.workers, [&](std::size_t i) {
        SourceOutcome& outcome = report.outcomes[i];
        if (!stack_errors[i].empty()) {
            outcome.error = stack_errors[i];
            return;
        }
        try {
            const std::uint64_t seed = derive_seed(cfg.ensemble.rng_seed, outcome.source_id);
            Rng rng(seed);
            std::vector<FusionCandidate> candidates =
                generate_candidates(stacks[i], report.calibration, cfg.ensemble, rng);
            const SelectionResult sel = select_pseudo_gt(candidates, scorers);
            FusionCandidate& winner = candidates[sel.winner_index];

            if (quality) {
                const GateDecision gate = quality_gate(winner, *quality, cfg.ensemble.quality_threshold);
                outcome.gate_score = gate.score;
                if (!gate.keep) {
                    outcome.accepted = false;
                    outcome.reject_reason = gate.reason;
                    return;
                }
            }
            outcome.records = emit_records(stacks[i], winner, out_dir, cfg.pairing, rng, seed);
            outcome.accepted = true;
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    });

    for (const SourceOutcome& o : report.outcomes) {
        if (!o.error.empty()) {
            report.failed += 1;
        } else if (o.accepted) {
            report.accepted += 1;
        } else {
            report.rejected += 1;
        }
    }
    return report;
}

std::vector<DatasetRecord> collect_records(const PipelineReport& report) {
    std::vector<DatasetRecord> records;
    for (const SourceOutcome& o : report.outcomes) {
        records.insert(records.end(), o.records.begin(), o.records.end());
    }
    return records;
}

}  // namespace mefgen
