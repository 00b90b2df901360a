#include <CLI11.hpp>

#include "saber/cli.hpp"

using namespace saber::cli;

int main(int argc, char** argv) {
    CLI::App app{"saber: lane-aware trajectory anomaly detection pipeline"};
    app.require_subcommand(1);

    GenDataOpts gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "generate synthetic highway scenes");
    cmd_gen->add_option("--config", gen.config_path, "generation config (JSON)");
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();

    TrainOpts tr;
    auto* cmd_train = app.add_subcommand("train", "train a detector variant");
    cmd_train->add_option("--config", tr.config_path, "train config (JSON)");
    cmd_train->add_option("--data", tr.data, "scene file or dataset directory");
    cmd_train->add_option("--out", tr.out_dir, "output directory")->required();
    cmd_train->add_option("--jobs", tr.jobs_override, "parallel window workers");
    cmd_train->add_option("--epochs", tr.epochs_override, "override epoch count");

    ScoreOpts sc;
    auto* cmd_score = app.add_subcommand("score", "write per-scene anomaly score series");
    cmd_score->add_option("--checkpoint", sc.checkpoint, "trained checkpoint");
    cmd_score->add_option("--data", sc.data, "scene file or dataset directory");
    cmd_score->add_option("--out", sc.out_dir, "output directory")->required();
    cmd_score->add_option("--detector", sc.detector, "model|cvm|<variant name>");
    cmd_score->add_option("--radius", sc.neighbor_radius, "neighbor radius d [m]");
    cmd_score->add_option("--window-len", sc.window_len, "window length T'");
    cmd_score->add_option("--stride", sc.stride, "window stride");
    cmd_score->add_option("--mc-samples", sc.mc_samples, "average over k sampled latents (0 = z = mu)");
    cmd_score->add_option("--seed", sc.seed, "sampling seed");
    cmd_score->add_option("--jobs", sc.jobs, "parallel scene workers");

    EvaluateOpts ev;
    auto* cmd_eval = app.add_subcommand("evaluate", "compute AUROC/AUPR/FPR metrics");
    cmd_eval->add_option("--scores", ev.scores_dir, "directory of score .tsv files");
    cmd_eval->add_option("--checkpoint", ev.checkpoint, "trained checkpoint (with --data)");
    cmd_eval->add_option("--data", ev.data, "scene file or dataset directory");
    cmd_eval->add_option("--out", ev.out_dir, "output directory")->required();
    cmd_eval->add_option("--detector", ev.detector, "model|cvm|<variant name>");
    cmd_eval->add_option("--radius", ev.neighbor_radius, "neighbor radius d [m]");
    cmd_eval->add_option("--window-len", ev.window_len, "window length T'");
    cmd_eval->add_option("--stride", ev.stride, "window stride");
    cmd_eval->add_option("--seed", ev.seed, "sampling seed");
    cmd_eval->add_option("--jobs", ev.jobs, "parallel scene workers");
    cmd_eval->add_option("--val-fraction", ev.val_fraction,
                         "evaluate only a seeded fraction of scenes (tuning split; default off)");
    cmd_eval->add_option("--val-seed", ev.val_seed, "seed for --val-fraction");

    ExportLatentOpts ex;
    auto* cmd_export = app.add_subcommand("export-latent", "dump per-timestep latent coordinates");
    cmd_export->add_option("--checkpoint", ex.checkpoint, "trained checkpoint")->required();
    cmd_export->add_option("--data", ex.data, "scene file or dataset directory");
    cmd_export->add_option("--out", ex.out_dir, "output directory")->required();
    cmd_export->add_option("--radius", ex.neighbor_radius, "neighbor radius d [m]");
    cmd_export->add_option("--window-len", ex.window_len, "window length T'");
    cmd_export->add_option("--stride", ex.stride, "window stride");
    cmd_export->add_option("--seed", ex.seed, "sampling seed");
    cmd_export->add_flag("--no-sample,!--sample", ex.sample, "export z = mu instead of sampled z");

    CLI11_PARSE(app, argc, argv);

    if (cmd_gen->parsed()) return run_command<GenDataOpts, run_gen_data>(gen);
    if (cmd_train->parsed()) return run_command<TrainOpts, run_train>(tr);
    if (cmd_score->parsed()) return run_command<ScoreOpts, run_score>(sc);
    if (cmd_eval->parsed()) return run_command<EvaluateOpts, run_evaluate>(ev);
    if (cmd_export->parsed()) return run_command<ExportLatentOpts, run_export_latent>(ex);
    return kUsageExit;
}
