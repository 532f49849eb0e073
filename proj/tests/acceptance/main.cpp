// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Criteria 7 and 9 drive the installed CLI (path in $MEFGEN_CLI).

#include "mefgen/color.hpp"
#include "mefgen/dataset.hpp"
#include "mefgen/ensemble.hpp"
#include "mefgen/exposure.hpp"
#include "mefgen/fusion.hpp"
#include "mefgen/iqa.hpp"
#include "mefgen/pipeline.hpp"
#include "mefgen/png_io.hpp"
#include "mefgen/pyramid.hpp"
#include "mefgen/rng.hpp"

#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace mefgen;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct Harness {
    fs::path work;
    std::string cli;
    fs::path niqe_model_path;

    Harness() {
        work = fs::temp_directory_path() / "mefgen_acceptance";
        fs::remove_all(work);
        fs::create_directories(work);
        const char* env = std::getenv("MEFGEN_CLI");
        cli = env ? env : "mefgen";
        niqe_model_path = work / "niqe_model.txt";
    }
    ~Harness() {
        std::error_code ec;
        fs::remove_all(work, ec);
    }

    int run_cli(const std::string& args) const {
        const std::string command = "\"" + cli + "\" " + args;
        const int rc = std::system(command.c_str());
        return rc < 0 ? rc : WEXITSTATUS(rc);
    }

    // 12 diverse clean fixtures, written once, reused by criteria 7/8/9
    const std::vector<fs::path>& corpus_files() {
        if (!corpus_files_.empty()) return corpus_files_;
        const fs::path dir = work / "pristine";
        fs::create_directories(dir);
        for (int i = 0; i < 12; ++i) {
            const fs::path p = dir / ("clean" + std::to_string(i) + ".png");
            save_image(p, test::scene_srgb(480, 480, 4000 + i));
            corpus_files_.push_back(p);
        }
        return corpus_files_;
    }

    NiqeModel niqe_model() {
        if (!fs::exists(niqe_model_path)) {
            std::vector<SrgbImage> corpus;
            for (const fs::path& p : corpus_files()) {
                corpus.push_back(load_srgb(p));
            }
            save_niqe_model(niqe_model_path, fit_niqe_model(corpus));
        }
        return load_niqe_model(niqe_model_path);
    }

  private:
    std::vector<fs::path> corpus_files_;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome pass(std::string detail) { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------

Outcome criterion_pyramid_roundtrip(Harness&) {
    const auto start = clock_type::now();
    Rng rng(0xACCE01);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 8 + static_cast<int>(rng.below(250));
        const int h = 8 + static_cast<int>(rng.below(250));
        const int max_depth = default_pyramid_depth(w, h);
        const int depth = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_depth)));
        const GrayImage img = test::random_gray(w, h, rng.next_u64());
        const GrayImage back = collapse(laplacian_pyramid(img, depth));
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            if (std::abs(back.data[i] - img.data[i]) > 1e-5f) {
                return fail("trial " + std::to_string(trial) + " (" + std::to_string(w) + "x" +
                            std::to_string(h) + " depth " + std::to_string(depth) + ") error " +
                            std::to_string(std::abs(back.data[i] - img.data[i])));
            }
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0) {
        return fail("round-trips exceeded the 10 s budget: " + std::to_string(elapsed) + " s");
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "50 images within 1e-5 in %.2f s", elapsed);
    return pass(buf);
}

Outcome criterion_normalization(Harness&) {
    const int n = 5, w = 128, h = 128;
    WeightMaps maps;
    maps.maps.assign(n, GrayImage(w, h));
    Rng rng(0xACCE02);
    for (GrayImage& m : maps.maps) {
        for (float& v : m.data) {
            v = static_cast<float>(rng.uniform01() * 3.0);
        }
    }
    // edge pixels: all-zero, and tiny sums straddling the 1e-6 rule
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < 64; ++i) {
            maps.maps[j].data[i] = 0.0f;
        }
        for (int i = 64; i < 128; ++i) {
            maps.maps[j].data[i] = static_cast<float>(rng.uniform01() * 1e-4);
        }
        for (int i = 128; i < 160; ++i) {
            maps.maps[j].data[i] = static_cast<float>(rng.uniform01() * 4e-7);
        }
    }
    const WeightMaps norm = normalize_weights(maps, 1e-12);
    const std::size_t pixels = maps.maps[0].pixel_count();
    for (std::size_t i = 0; i < pixels; ++i) {
        double sum = 0.0, raw = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = norm.maps[j].data[i];
            if (v < 0.0 || v > 1.0) {
                return fail("w' out of [0,1] at pixel " + std::to_string(i));
            }
            sum += v;
            raw += maps.maps[j].data[i];
        }
        if (sum > 1.0) {
            return fail("sum w' > 1 at pixel " + std::to_string(i) + ": " + std::to_string(sum));
        }
        if (raw >= 1e-6 && sum < 0.999999) {
            return fail("sum w' = " + std::to_string(sum) + " below 0.999999 with raw sum " +
                        std::to_string(raw));
        }
    }
    return pass("bounds hold on 16384 pixels including zero and near-zero mass");
}

Outcome criterion_idempotence_permutation(Harness&) {
    const SrgbImage frame = test::scene_srgb(96, 64, 0xACCE03);
    for (int n : {3, 5}) {
        std::vector<SrgbImage> frames(n, frame);
        std::vector<double> evs;
        for (int i = 0; i < n; ++i) {
            evs.push_back(i - (n - 1) / 2.0);
        }
        const ExposureStack stack = make_stack(frames, evs, "dup");
        for (const std::string& engine : builtin_engines()) {
            const FusionCandidate cand = run_engine(stack, engine, FusionConfig{});
            for (std::size_t i = 0; i < frame.data.size(); ++i) {
                if (std::abs(int(cand.image.data[i]) - int(frame.data[i])) > 1) {
                    return fail(engine + " drifted on " + std::to_string(n) + " identical frames");
                }
            }
        }
    }

    // permutation invariance, bit-identical
    const ExposureStack stack = render_mes(test::exposure_ramp(128, 32), {-2, 0, 2}, "ramp");
    ExposureStack permuted = stack;
    std::swap(permuted.frames[0], permuted.frames[2]);
    ExposureStack rotated = stack;
    std::rotate(rotated.frames.begin(), rotated.frames.begin() + 1, rotated.frames.end());
    for (const std::string& engine : builtin_engines()) {
        const SrgbImage base = run_engine(stack, engine, FusionConfig{}).image;
        if (run_engine(permuted, engine, FusionConfig{}).image.data != base.data) {
            return fail(engine + " output changed under frame swap");
        }
        if (run_engine(rotated, engine, FusionConfig{}).image.data != base.data) {
            return fail(engine + " output changed under frame rotation");
        }
    }
    return pass("3 engines idempotent within 1/255 and permutation-invariant bit-for-bit");
}

Outcome criterion_dynamic_range(Harness&) {
    const ExposureStack stack = render_mes(test::exposure_ramp(256, 32), {-2, 0, 2}, "ramp");
    const FusionCandidate fused = run_engine(stack, "mertens", FusionConfig{});
    std::size_t min_clipped = stack.frames.front().pixel_count();
    for (const SrgbImage& frame : stack.frames) {
        min_clipped = std::min(min_clipped, test::clipped_pixel_count(frame));
    }
    const std::size_t fused_clipped = test::clipped_pixel_count(fused.image);
    if (fused_clipped > min_clipped) {
        return fail("fused clips " + std::to_string(fused_clipped) + " > best frame " +
                    std::to_string(min_clipped));
    }
    const std::size_t required = fused.image.pixel_count() / 5;
    if (min_clipped - fused_clipped < required) {
        return fail("improvement " + std::to_string(min_clipped - fused_clipped) + " px below 20% (" +
                    std::to_string(required) + " px)");
    }
    return pass("fused " + std::to_string(fused_clipped) + " clipped vs best frame " +
                std::to_string(min_clipped) + " of " + std::to_string(fused.image.pixel_count()));
}

Outcome criterion_exposure(Harness&) {
    const LinearImage scene = test::scene_linear(64, 48, 0xACCE05, 3.0f);
    if (!(render_ev(scene, 0.0) == srgb_encode(scene))) {
        return fail("render_ev at EV 0 differs from srgb_encode");
    }
    SrgbImage prev = render_ev(scene, -4.0);
    for (double ev = -3.5; ev <= 4.0; ev += 0.5) {
        const SrgbImage cur = render_ev(scene, ev);
        for (std::size_t i = 0; i < cur.data.size(); ++i) {
            if (cur.data[i] < prev.data[i]) {
                return fail("code decreased between EVs at pixel " + std::to_string(i));
            }
        }
        prev = cur;
    }
    // retargeting on unclipped fixtures
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        LinearImage mild = test::scene_linear(64, 48, seed, 0.8f);
        for (float& v : mild.data) {
            v *= 0.25f;  // keep headroom so no target clips
        }
        const SrgbImage img = srgb_encode(mild);
        for (double target : {0.3, 0.5, 0.7}) {
            const RetargetResult r = retarget_exposure(img, {target});
            const double err = std::abs(mean_intensity(r.image) - target);
            if (!r.target_reached || err > 1e-3) {
                return fail("retarget to " + std::to_string(target) + " missed by " + std::to_string(err));
            }
        }
    }
    return pass("EV-0 identity exact, codes monotone in EV, retarget within 1e-3");
}

Outcome criterion_aggd(Harness&) {
    const AggdFit gauss = fit_aggd(test::gaussian_samples(1'000'000, 0xACCE06));
    if (std::abs(gauss.alpha - 2.0) > 0.2) {
        return fail("gaussian alpha " + std::to_string(gauss.alpha) + " outside 2.0 +/- 10%");
    }
    const AggdFit laplace = fit_aggd(test::laplacian_samples(1'000'000, 0xACCE07));
    if (std::abs(laplace.alpha - 1.0) > 0.1) {
        return fail("laplacian alpha " + std::to_string(laplace.alpha) + " outside 1.0 +/- 10%");
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "alpha %.3f (gaussian), %.3f (laplacian)", gauss.alpha, laplace.alpha);
    return pass(buf);
}

Outcome criterion_niqe_monotonicity(Harness& h) {
    const auto start = clock_type::now();
    // fit through the CLI, as operators would
    std::ostringstream cmd;
    cmd << "fit-niqe --corpus \"" << (h.work / "pristine").string() << "/clean*.png\" --out \""
        << h.niqe_model_path.string() << "\" > /dev/null";
    h.corpus_files();
    const int rc = h.run_cli(cmd.str());
    if (rc != 0) {
        return fail("fit-niqe exited with " + std::to_string(rc));
    }
    const NiqeModel model = load_niqe_model(h.niqe_model_path);

    const SrgbImage clean = test::scene_srgb(512, 512, 0xACCE08);
    const double s5 = niqe(test::add_gaussian_noise(clean, 5.0, 1), model).value;
    const double s15 = niqe(test::add_gaussian_noise(clean, 15.0, 2), model).value;
    const double s30 = niqe(test::add_gaussian_noise(clean, 30.0, 3), model).value;
    const double elapsed = seconds_since(start);
    if (!(s5 < s15 && s15 < s30)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "not monotone: %.3f, %.3f, %.3f", s5, s15, s30);
        return fail(buf);
    }
    if (elapsed >= 60.0) {
        return fail("exceeded the 60 s budget: " + std::to_string(elapsed) + " s");
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "niqe %.2f < %.2f < %.2f for sigma 5/15/30, %.1f s", s5, s15, s30,
                  elapsed);
    return pass(buf);
}

Outcome criterion_ensemble_argbest(Harness& h) {
    const NiqeModel model = h.niqe_model();
    const Scorer niqe_scorer{"niqe", Polarity::lower_better,
                             [model](const SrgbImage& img) { return niqe(img, model).value; }};

    EnsembleConfig cfg;
    cfg.n_blends = 10;
    cfg.blend_pick = 3;
    CalibrationResult calib;
    calib.win_counts = {{"mertens", 500}, {"gradient", 300}, {"flat-weighted", 200}};

    for (int s = 0; s < 5; ++s) {
        const ExposureStack stack =
            render_mes(test::scene_linear(160, 128, 0xACCE09 + s, 3.5f), default_evs(), "fx" + std::to_string(s));
        Rng rng(derive_seed(77, stack.source_id));
        std::vector<FusionCandidate> pool = generate_candidates(stack, calib, cfg, rng);
        const SelectionResult sel = select_pseudo_gt(pool, {niqe_scorer});
        const double winner = pool[sel.winner_index].scores.at("niqe").value;
        for (std::size_t e = 0; e < cfg.engines.size(); ++e) {
            const double engine_score = pool[e].scores.at("niqe").value;
            if (!(winner <= engine_score)) {  // exact argbest, zero tolerance
                return fail("source " + std::to_string(s) + ": selected " + std::to_string(winner) +
                            " > engine " + cfg.engines[e] + " " + std::to_string(engine_score));
            }
        }
    }
    return pass("selected pseudo-GT NIQE <= every engine NIQE on 5 sources, exact");
}

Outcome criterion_pipeline_determinism(Harness& h) {
    const auto start = clock_type::now();
    h.niqe_model();  // ensure the model file exists

    const fs::path src = h.work / "corpus20";
    fs::create_directories(src);
    for (int i = 0; i < 20; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "fix%02d.png", i);
        save_image(src / name, test::scene_linear(160, 128, 0xACCE0A + i, 3.0f));
    }
    const fs::path config = h.work / "pipeline.conf";
    {
        std::ofstream out(config);
        out << "engines = mertens,gradient,flat-weighted\n"
            << "metrics = niqe\n"
            << "niqe_model = " << h.niqe_model_path.string() << "\n"
            << "n_blends = 10\n"
            << "blend_pick = 3\n"
            << "calibration_groups = 40\n"
            << "evs = -3,-2,-1,0,1,2,3\n"
            << "pairing = all-frames\n";
    }

    auto run = [&](const char* tag, int workers) -> int {
        std::ostringstream cmd;
        cmd << "gen-dataset --in \"" << src.string() << "\" --out \"" << (h.work / tag).string()
            << "\" --config \"" << config.string() << "\" --seed 20250809 --workers " << workers
            << " > /dev/null";
        return h.run_cli(cmd.str());
    };
    if (run("runA", 1) != 0) return fail("gen-dataset run A failed");
    if (run("runB", 1) != 0) return fail("gen-dataset run B failed");
    if (run("runC", 8) != 0) return fail("gen-dataset run C failed");

    const std::string a = read_bytes(h.work / "runA" / "manifest.jsonl");
    const std::string b = read_bytes(h.work / "runB" / "manifest.jsonl");
    const std::string c = read_bytes(h.work / "runC" / "manifest.jsonl");
    if (a.empty()) return fail("run A produced an empty manifest");
    if (a != b) return fail("re-run with the same seed changed the manifest");
    if (a != c) return fail("worker count changed the manifest");
    const double elapsed = seconds_since(start);
    if (elapsed >= 300.0) {
        return fail("exceeded the 5 min budget: " + std::to_string(elapsed) + " s");
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "3 runs byte-identical (%zu bytes), %.0f s total", a.size(), elapsed);
    return pass(buf);
}

Outcome criterion_quality_gate(Harness& h) {
    FusionCandidate cand;
    cand.image = test::scene_srgb(64, 64, 0xACCE0B);
    const double values[3] = {0.49, 0.50, 0.51};
    const bool expect_keep[3] = {false, true, true};
    for (int i = 0; i < 3; ++i) {
        const fs::path script = h.work / ("gate" + std::to_string(i) + ".sh");
        {
            std::ofstream out(script);
            out << "#!/bin/sh\necho " << values[i] << "\n";
        }
        fs::permissions(script, fs::perms::owner_all);
        ExternalScorerConfig ext;
        ext.command = {script.string()};
        ext.metric_name = "stub";
        ext.polarity = Polarity::higher_better;
        const Scorer scorer{"stub", Polarity::higher_better,
                            [ext](const SrgbImage& img) { return external_score(img, ext).value; }};
        const GateDecision decision = quality_gate(cand, scorer, 0.5);
        if (decision.keep != expect_keep[i]) {
            return fail("stub " + std::to_string(values[i]) + " gave " +
                        (decision.keep ? "keep" : "reject"));
        }
    }
    return pass("0.49 rejects, 0.50 and 0.51 keep at threshold 0.5");
}

Outcome criterion_pairing_ratio(Harness& h) {
    const fs::path src = h.work / "pair_src";
    const fs::path out = h.work / "pair_out";
    fs::create_directories(src);
    for (int i = 0; i < 3; ++i) {
        save_image(src / ("p" + std::to_string(i) + ".png"),
                   test::scene_linear(128, 96, 0xACCE0C + i, 2.5f));
    }
    PipelineConfig cfg;
    cfg.metrics = {"brisque"};
    cfg.evs = default_evs();
    cfg.pairing = Pairing::all_frames;
    cfg.ensemble.calibration_groups = 4;
    cfg.ensemble.n_blends = 2;
    std::vector<fs::path> sources;
    for (const auto& e : fs::directory_iterator(src)) {
        sources.push_back(e.path());
    }
    std::sort(sources.begin(), sources.end());
    const PipelineReport report = run_pipeline(sources, out, cfg);
    if (report.accepted == 0) {
        return fail("no sources accepted");
    }
    std::map<std::string, int> per_source;
    for (const DatasetRecord& r : collect_records(report)) {
        per_source[r.source_id] += 1;
    }
    for (const auto& [id, count] : per_source) {
        if (count != 7) {
            return fail(id + " paired " + std::to_string(count) + " records, expected 7");
        }
    }
    const std::size_t total = collect_records(report).size();
    if (total != report.accepted * 7) {
        return fail("record total " + std::to_string(total) + " != 7 x accepted");
    }
    return pass(std::to_string(report.accepted) + " sources x 7 records each (ratio 7.0)");
}

}  // namespace

int main() {
    Harness harness;
    struct Criterion {
        int number;
        const char* name;
        std::function<Outcome(Harness&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "pyramid round-trip on 50 seeded images", criterion_pyramid_roundtrip},
        {2, "weight normalization bounds", criterion_normalization},
        {3, "fusion idempotence and permutation invariance", criterion_idempotence_permutation},
        {4, "dynamic-range recovery on the bracketed ramp", criterion_dynamic_range},
        {5, "exposure identity, monotonicity, retarget tolerance", criterion_exposure},
        {6, "AGGD alpha recovery", criterion_aggd},
        {7, "NIQE noise monotonicity via fit-niqe", criterion_niqe_monotonicity},
        {8, "ensemble beats individual engines (argbest)", criterion_ensemble_argbest},
        {9, "pipeline determinism across runs and workers", criterion_pipeline_determinism},
        {10, "quality gate threshold boundary", criterion_quality_gate},
        {11, "all-frames pairing ratio of 7", criterion_pairing_ratio},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run(harness);
        } catch (const std::exception& e) {
            outcome = fail(std::string("exception: ") + e.what());
        }
        std::printf("%s - criterion %2d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", c.number, c.name,
                    outcome.detail.c_str());
        std::fflush(stdout);
        failures += !outcome.pass;
    }
    if (failures) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
