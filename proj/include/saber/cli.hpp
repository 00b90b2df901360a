#pragma once

#include <string>

namespace saber::cli {

// Named exit codes; the README documents them.
enum ExitCode : int {
    kOkExit = 0,
    kUsageExit = 1,
    kConfigExit = 2,
    kDataExit = 3,
    kSingleClassExit = 4,
    kCheckpointExit = 5,
    kInternalExit = 7,
};

struct GenDataOpts {
    std::string config_path;  // empty -> built-in defaults
    std::string out_dir;
};

struct TrainOpts {
    std::string config_path;  // empty -> defaults
    std::string data;         // scene file or dataset dir (uses train.jsonl)
    std::string out_dir;
    int jobs_override = 0;    // > 0 overrides the config
    int epochs_override = 0;
};

struct ScoreOpts {
    std::string checkpoint;  // unused for detector == "cvm"
    std::string data;        // scene file or dataset dir (uses test.jsonl)
    std::string out_dir;
    std::string detector = "model";  // "model" (from checkpoint) or "cvm"
    double neighbor_radius = 45.0;
    int window_len = 15;
    int stride = 1;
    int mc_samples = 0;
    uint64_t seed = 0;
    int jobs = 1;
};

struct EvaluateOpts {
    std::string scores_dir;  // either this ...
    std::string checkpoint;  // ... or checkpoint+data
    std::string data;
    std::string out_dir;
    std::string detector = "model";
    double neighbor_radius = 45.0;
    int window_len = 15;
    int stride = 1;
    uint64_t seed = 0;
    int jobs = 1;
    // optional tuning-style subset evaluation (off by default)
    double val_fraction = 0.0;
    uint64_t val_seed = 0;
};

struct ExportLatentOpts {
    std::string checkpoint;
    std::string data;
    std::string out_dir;
    double neighbor_radius = 45.0;
    int window_len = 15;
    int stride = 1;
    uint64_t seed = 0;
    bool sample = true;  // draw z; false exports z = mu
};

void run_gen_data(const GenDataOpts& o);
void run_train(const TrainOpts& o);
void run_score(const ScoreOpts& o);
void run_evaluate(const EvaluateOpts& o);
void run_export_latent(const ExportLatentOpts& o);

// Runs `fn`, mapping typed failures onto exit codes and printing a
// structured JSON error line to stderr.
int guarded(void (*fn)(const void*), const void* opts);

template <typename Opts, void (*Fn)(const Opts&)>
int run_command(const Opts& opts) {
    return guarded([](const void* o) { Fn(*static_cast<const Opts*>(o)); }, &opts);
}

// Resolves `--data`: explicit path, or $SABER_DATA_DIR when empty.
std::string resolve_data_path(const std::string& data, const std::string& filename);

}  // namespace saber::cli
