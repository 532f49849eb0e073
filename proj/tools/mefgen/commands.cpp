#include "commands.hpp"

#include "contact_sheet.hpp"
#include "mefgen/color.hpp"
#include "mefgen/dataset.hpp"
#include "mefgen/iqa.hpp"
#include "mefgen/pipeline.hpp"
#include "mefgen/png_io.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mefgen::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, ',')) {
        if (token.empty()) continue;
        out.push_back(std::stod(token));
    }
    return out;
}

std::vector<fs::path> png_sources(const std::string& in) {
    std::vector<fs::path> sources;
    const fs::path p(in);
    if (fs::is_directory(p)) {
        for (const auto& entry : fs::directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".png") {
                sources.push_back(entry.path());
            }
        }
        std::sort(sources.begin(), sources.end());
    } else if (fs::is_regular_file(p)) {
        sources.push_back(p);
    }
    return sources;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
    glob_t g{};
    std::vector<fs::path> out;
    if (::glob(pattern.c_str(), GLOB_TILDE, nullptr, &g) == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) {
            out.emplace_back(g.gl_pathv[i]);
        }
    }
    ::globfree(&g);
    std::sort(out.begin(), out.end());
    return out;
}

// accept both 8-bit sRGB and 16-bit linear inputs for scoring
SrgbImage load_any_srgb(const fs::path& path) {
    try {
        return load_srgb(path);
    } catch (const IoError&) {
        return srgb_encode(load_image(path));
    }
}

// EVs from "<stem>_ev<signed>" file names; falls back to centered indices
std::vector<double> stack_evs(const std::vector<fs::path>& files) {
    std::vector<double> evs;
    bool parsed_all = true;
    for (const fs::path& f : files) {
        const std::string stem = f.stem().string();
        const auto pos = stem.rfind("_ev");
        if (pos == std::string::npos) {
            parsed_all = false;
            break;
        }
        try {
            evs.push_back(std::stod(stem.substr(pos + 3)));
        } catch (const std::exception&) {
            parsed_all = false;
            break;
        }
    }
    if (parsed_all && evs.size() == files.size()) {
        return evs;
    }
    evs.clear();
    for (std::size_t i = 0; i < files.size(); ++i) {
        evs.push_back(static_cast<double>(i) - (static_cast<double>(files.size()) - 1) / 2.0);
    }
    return evs;
}

}  // namespace

int cmd_render_mes(const RenderMesArgs& args) {
    const auto sources = png_sources(args.in);
    if (sources.empty()) {
        std::cerr << "render-mes: no PNG inputs under " << args.in << "\n";
        return kExitUsage;
    }
    const fs::path out_dir(args.out);
    int failures = 0;
    for (const fs::path& source : sources) {
        const std::string id = source.stem().string();
        try {
            ExposureStack stack;
            if (args.from_srgb) {
                std::vector<StyleCode> targets;
                for (double z : parse_double_list(args.targets)) {
                    targets.push_back({z});
                }
                stack = synthesize_mes(load_srgb(source), targets, id);
            } else {
                stack = render_mes(load_image(source), parse_double_list(args.evs), id);
            }
            const fs::path mes_dir = out_dir / "mes" / id;
            fs::create_directories(mes_dir);
            for (std::size_t i = 0; i < stack.size(); ++i) {
                save_image(mes_dir / frame_file_name(id, stack.evs[i]), stack.frames[i]);
            }
            const fs::path preview_dir = out_dir / "preview";
            fs::create_directories(preview_dir);
            save_image(preview_dir / (id + "_mes.png"), contact_sheet(stack));
            std::cout << id << ": " << stack.size() << " frames\n";
        } catch (const std::exception& e) {
            std::cerr << "render-mes: " << source.string() << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures ? kExitPartial : kExitOk;
}

int cmd_fuse(const FuseArgs& args) {
    const auto files = png_sources(args.stack_dir);
    if (files.size() < 2) {
        std::cerr << "fuse: need at least 2 frames in " << args.stack_dir << "\n";
        return kExitUsage;
    }
    if (args.engine != "gradient" && args.engine != "mertens" && args.engine != "flat-weighted") {
        std::cerr << "fuse: unknown engine " << args.engine << "\n";
        return kExitUsage;
    }
    try {
        // order frames by EV label, not by file name
        std::vector<double> evs = stack_evs(files);
        std::vector<std::size_t> order(files.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return evs[a] < evs[b]; });
        std::vector<SrgbImage> frames;
        std::vector<double> sorted_evs;
        for (std::size_t i : order) {
            frames.push_back(load_any_srgb(files[i]));
            sorted_evs.push_back(evs[i]);
        }
        const ExposureStack stack = make_stack(std::move(frames), std::move(sorted_evs),
                                               fs::path(args.stack_dir).filename().string());
        FusionConfig cfg;
        cfg.epsilon = args.epsilon;

        WeightMaps weights = args.engine == "gradient" ? gradient_weights(stack, cfg)
                                                       : mertens_weights(stack, cfg);
        const WeightMaps normalized = normalize_weights(weights, cfg.epsilon);
        const bool flat = args.flat || args.engine == "flat-weighted";
        const SrgbImage fused = flat ? fuse_flat(stack, normalized)
                                     : fuse_pyramid(stack, normalized, cfg.pyramid_depth);
        save_image(args.out, fused);
        std::cout << "wrote " << args.out << "\n";

        if (args.dump_weights) {
            const fs::path base = fs::path(args.out).parent_path();
            for (std::size_t j = 0; j < normalized.maps.size(); ++j) {
                const GrayImage& map = normalized.maps[j];
                SrgbImage vis(map.width, map.height);
                for (std::size_t i = 0; i < map.data.size(); ++i) {
                    const auto v = static_cast<std::uint8_t>(
                        std::lround(std::clamp(map.data[i], 0.0f, 1.0f) * 255.0f));
                    vis.data[i * 3 + 0] = vis.data[i * 3 + 1] = vis.data[i * 3 + 2] = v;
                }
                const fs::path wp = base / ("weight_" + std::to_string(j) + ".png");
                save_image(wp, vis);
                std::cout << "wrote " << wp.string() << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "fuse: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_score(const ScoreArgs& args) {
    const auto files = expand_glob(args.in_glob);
    if (files.empty()) {
        std::cerr << "score: no files match " << args.in_glob << "\n";
        return kExitUsage;
    }
    PipelineConfig cfg;
    cfg.metrics = {};
    {
        std::istringstream is(args.metrics);
        std::string token;
        while (std::getline(is, token, ',')) {
            if (!token.empty()) cfg.metrics.push_back(token);
        }
    }
    cfg.niqe_model_path = args.niqe_model;
    cfg.brisque_model_path = args.brisque_model;

    ScorerList scorers;
    try {
        scorers = make_scorers(cfg);
    } catch (const std::exception& e) {
        std::cerr << "score: " << e.what() << "\n";
        return kExitUsage;
    }

    std::cout << "path,metric,value,polarity\n";
    int failures = 0;
    for (const fs::path& file : files) {
        try {
            const SrgbImage img = load_any_srgb(file);
            for (const Scorer& scorer : scorers) {
                const IqaScore score = scorer.score(img);
                std::printf("%s,%s,%.6g,%s\n", file.c_str(), score.metric.c_str(), score.value,
                            to_string(score.polarity));
            }
        } catch (const std::exception& e) {
            std::cerr << "score: " << file.string() << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures ? kExitPartial : kExitOk;
}

int cmd_fit_niqe(const FitNiqeArgs& args) {
    const auto files = expand_glob(args.corpus_glob);
    if (files.size() < 10) {
        std::cerr << "fit-niqe: need at least 10 corpus images, found " << files.size() << "\n";
        return kExitUsage;
    }
    try {
        std::vector<SrgbImage> corpus;
        for (const fs::path& f : files) {
            corpus.push_back(load_any_srgb(f));
        }
        const NiqeModel model = fit_niqe_model(corpus, args.patch_size, args.sharpness_fraction);
        save_niqe_model(args.out, model);
        std::cout << "fitted on " << corpus.size() << " images -> " << args.out << "\n";
        const int rank = niqe_model_rank(model);
        if (rank < kIqaFeatureCount) {
            std::cerr << "fit-niqe: note: covariance rank " << rank << " of " << kIqaFeatureCount
                      << "; scoring will use a pseudo-inverse (a larger corpus tightens the model)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "fit-niqe: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_gen_dataset(const GenDatasetArgs& args) {
    PipelineConfig cfg;
    try {
        cfg = load_config(args.config);
        if (args.seed >= 0) {
            cfg.ensemble.rng_seed = static_cast<std::uint64_t>(args.seed);
        }
        if (args.workers > 0) {
            cfg.workers = args.workers;
        }
    } catch (const std::exception& e) {
        std::cerr << "gen-dataset: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto sources = png_sources(args.in);
    if (sources.empty()) {
        std::cerr << "gen-dataset: no PNG sources under " << args.in << "\n";
        return kExitUsage;
    }
    const fs::path out_dir(args.out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    try {
        // record the effective config next to the outputs
        std::ofstream snapshot(out_dir / "config.snapshot");
        snapshot << dump_config(cfg);
        snapshot.close();

        const PipelineReport report = run_pipeline(sources, out_dir, cfg);

        write_manifest(collect_records(report), out_dir / "manifest.jsonl");

        std::ofstream rejections(out_dir / "rejections.log");
        for (const SourceOutcome& o : report.outcomes) {
            if (!o.accepted && o.error.empty()) {
                rejections << o.source_id << "\t" << o.reject_reason << "\t" << o.gate_score << "\n";
            }
        }
        rejections.close();

        for (const SourceOutcome& o : report.outcomes) {
            if (!o.error.empty()) {
                std::cerr << "gen-dataset: " << o.source_id << ": " << o.error << "\n";
            }
        }
        std::cout << "sources: " << report.outcomes.size() << " accepted: " << report.accepted
                  << " rejected: " << report.rejected << " failed: " << report.failed << "\n";
        if (report.calibration.groups_skipped > 0) {
            std::cerr << "gen-dataset: " << report.calibration.groups_skipped
                      << " calibration groups skipped\n";
        }
        const CorpusStats stats = corpus_stats(collect_records(report), out_dir, report.rejected);
        std::cout << format_stats(stats);
        return report.failed == 0 ? kExitOk : kExitPartial;
    } catch (const ConfigError& e) {
        std::cerr << "gen-dataset: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "gen-dataset: " << e.what() << "\n";
        return kExitPartial;
    }
}

int cmd_stats(const StatsArgs& args) {
    try {
        const auto records = read_manifest(args.manifest);
        std::uint64_t rejected = 0;
        const fs::path log = fs::path(args.manifest).parent_path() / "rejections.log";
        if (fs::exists(log)) {
            std::ifstream in(log);
            std::string line;
            while (std::getline(in, line)) {
                rejected += !line.empty();
            }
        }
        const CorpusStats stats = corpus_stats(records, fs::path(args.manifest).parent_path(), rejected);
        std::cout << format_stats(stats);
        if (!args.csv_out.empty()) {
            std::ofstream csv(args.csv_out);
            csv << stats_csv(stats);
            std::cout << "wrote " << args.csv_out << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return kExitPartial;
    }
}

}  // namespace mefgen::cli
