#pragma once

#include <string>
#include <vector>

namespace mefgen::cli {

// exit codes: 0 success, 1 partial per-file failures, 2 usage/config error
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

struct RenderMesArgs {
    std::string in;
    std::string out;
    std::string evs = "-3,-2,-1,0,1,2,3";
    bool from_srgb = false;
    std::string targets = "0.25,0.5,0.75";
};

struct FuseArgs {
    std::string stack_dir;
    std::string engine = "mertens";
    bool flat = false;
    double epsilon = 1e-12;
    bool dump_weights = false;
    std::string out = "fused.png";
};

struct ScoreArgs {
    std::string in_glob;
    std::string metrics = "niqe,brisque";
    std::string niqe_model;
    std::string brisque_model;
};

struct FitNiqeArgs {
    std::string corpus_glob;
    std::string out;
    int patch_size = 96;
    double sharpness_fraction = 0.75;
};

struct GenDatasetArgs {
    std::string in;
    std::string out;
    std::string config;
    long long seed = -1;   // -1 = take from config
    int workers = 0;       // 0 = take from config / cpu count
};

struct StatsArgs {
    std::string manifest;
    std::string csv_out;
};

int cmd_render_mes(const RenderMesArgs& args);
int cmd_fuse(const FuseArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_fit_niqe(const FitNiqeArgs& args);
int cmd_gen_dataset(const GenDatasetArgs& args);
int cmd_stats(const StatsArgs& args);

}  // namespace mefgen::cli
