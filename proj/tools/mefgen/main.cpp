#include "CLI11.hpp"

#include "commands.hpp"

#include <iostream>

using namespace mefgen::cli;

int main(int argc, char** argv) {
    CLI::App app{"mefgen: multi-exposure fusion dataset generator"};
    app.require_subcommand(1);

    RenderMesArgs render_args;
    auto* render = app.add_subcommand("render-mes", "Render an exposure stack per source image");
    render->add_option("--in", render_args.in, "Source PNG file or directory")->required();
    render->add_option("--out", render_args.out, "Output directory")->required();
    render->add_option("--evs", render_args.evs, "Comma-separated EV list (stops)");
    render->add_flag("--from-srgb", render_args.from_srgb,
                     "Treat inputs as 8-bit sRGB and synthesize the stack by exposure retargeting");
    render->add_option("--targets", render_args.targets, "Style-code targets for --from-srgb");

    FuseArgs fuse_args;
    auto* fuse = app.add_subcommand("fuse", "Fuse one exposure stack directory");
    fuse->add_option("--stack", fuse_args.stack_dir, "Directory of stack frames")->required();
    fuse->add_option("--engine", fuse_args.engine, "mertens | gradient | flat-weighted");
    fuse->add_flag("--flat", fuse_args.flat, "Force single-level (flat) fusion");
    fuse->add_option("--epsilon", fuse_args.epsilon, "Weight normalization epsilon");
    fuse->add_flag("--dump-weights", fuse_args.dump_weights, "Write normalized weight maps as PNGs");
    fuse->add_option("--out", fuse_args.out, "Output PNG path");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score images with no-reference metrics (CSV on stdout)");
    score->add_option("--in", score_args.in_glob, "Input glob")->required();
    score->add_option("--metrics", score_args.metrics, "niqe,brisque[,ext:<command>]");
    score->add_option("--niqe-model", score_args.niqe_model, "NIQE model file");
    score->add_option("--brisque-model", score_args.brisque_model, "BRISQUE regressor file");

    FitNiqeArgs fit_args;
    auto* fit = app.add_subcommand("fit-niqe", "Fit a NIQE pristine model from a corpus");
    fit->add_option("--corpus", fit_args.corpus_glob, "Corpus glob")->required();
    fit->add_option("--out", fit_args.out, "Model output path")->required();
    fit->add_option("--patch-size", fit_args.patch_size, "Patch size in pixels");
    fit->add_option("--sharpness", fit_args.sharpness_fraction, "Sharpness gating fraction");

    GenDatasetArgs gen_args;
    auto* gen = app.add_subcommand("gen-dataset", "Run the full dataset generation pipeline");
    gen->add_option("--in", gen_args.in, "Source image directory")->required();
    gen->add_option("--out", gen_args.out, "Output dataset directory")->required();
    gen->add_option("--config", gen_args.config, "Pipeline config file")->required();
    gen->add_option("--seed", gen_args.seed, "Override the config RNG seed");
    gen->add_option("--workers", gen_args.workers, "Worker thread count");

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Summarize a dataset manifest");
    stats->add_option("--manifest", stats_args.manifest, "Manifest path")->required();
    stats->add_option("--csv", stats_args.csv_out, "Also write the stats as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (render->parsed()) return cmd_render_mes(render_args);
    if (fuse->parsed()) return cmd_fuse(fuse_args);
    if (score->parsed()) return cmd_score(score_args);
    if (fit->parsed()) return cmd_fit_niqe(fit_args);
    if (gen->parsed()) return cmd_gen_dataset(gen_args);
    if (stats->parsed()) return cmd_stats(stats_args);
    return kExitUsage;
}
