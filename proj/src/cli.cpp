#include "saber/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "saber/baselines.hpp"
#include "saber/config.hpp"
#include "saber/hashing.hpp"
#include "saber/manifest.hpp"
#include "saber/metrics.hpp"
#include "saber/scene_io.hpp"
#include "saber/scoring.hpp"
#include "saber/synth.hpp"
#include "saber/train.hpp"

namespace fs = std::filesystem;

namespace saber::cli {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

std::string digest_of(const std::string& path) { return hex64(file_digest(path)); }

std::vector<Scene> load_scene_input(const std::string& data, const std::string& default_file,
                                    std::string* resolved) {
    std::string path = resolve_data_path(data, default_file);
    if (fs::is_directory(path)) path = (fs::path(path) / default_file).string();
    if (resolved) *resolved = path;
    return load_scenes(path);
}

}  // namespace

std::string resolve_data_path(const std::string& data, const std::string& filename) {
    if (!data.empty()) return data;
    const char* env = std::getenv("SABER_DATA_DIR");
    if (env && *env) return (fs::path(env) / filename).string();
    throw ConfigError("no data path given and SABER_DATA_DIR is not set");
}

void run_gen_data(const GenDataOpts& o) {
    Timer timer;
    DatasetSpec spec = DatasetSpec::defaults();
    nlohmann::ordered_json cfg_json;
    if (!o.config_path.empty()) {
        cfg_json = load_json_file(o.config_path);
        spec = parse_gen_config(cfg_json);
    }
    try {
        Dataset ds = generate_dataset(spec);
        ensure_dir(o.out_dir);
        std::string train_path = (fs::path(o.out_dir) / "train.jsonl").string();
        std::string test_path = (fs::path(o.out_dir) / "test.jsonl").string();
        save_scenes(ds.train, train_path);
        save_scenes(ds.test, test_path);

        RunManifest m;
        m.command = "gen-data";
        m.seed = spec.master_seed;
        m.config = gen_config_to_json(spec);
        if (!o.config_path.empty()) m.inputs.emplace_back(o.config_path, digest_of(o.config_path));
        m.outputs = {train_path, test_path};
        m.wall_s = timer.seconds();
        write_manifest(m, (fs::path(o.out_dir) / "manifest.json").string());
        std::cerr << "gen-data: " << ds.train.size() << " train scenes, " << ds.test.size() << " test scenes -> "
                  << o.out_dir << "\n";
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void run_train(const TrainOpts& o) {
    Timer timer;
    TrainConfig cfg;
    if (!o.config_path.empty()) cfg = parse_train_config(load_json_file(o.config_path));
    if (o.jobs_override > 0) cfg.jobs = o.jobs_override;
    if (o.epochs_override > 0) cfg.epochs = o.epochs_override;

    std::string data_path;
    std::vector<Scene> scenes = load_scene_input(o.data, "train.jsonl", &data_path);
    for (const auto& s : scenes) {
        for (Label l : s.labels) {
            if (l == Label::Abnormal) {
                throw SceneIoError("training data must contain only normal scenes; scene '" + s.scene_id +
                                   "' has abnormal labels");
            }
        }
    }

    WindowDataset data = prepare_windows(scenes, cfg.neighbor_radius, cfg.window_len, cfg.stride);
    for (const auto& note : data.notes) std::cerr << "warning: " << note.scene_id << ": " << note.message << "\n";

    Model model(cfg.model);
    model.init_params(mix_seed(cfg.seed, 0x696e6974ULL));
    TrainResult result = train(model, data, cfg, &std::cerr);

    ensure_dir(o.out_dir);
    std::string last_path = (fs::path(o.out_dir) / "checkpoint_last.ckpt").string();
    std::string best_path = (fs::path(o.out_dir) / "checkpoint_best.ckpt").string();
    model.save_checkpoint(last_path);
    {
        std::vector<double> last(model.params().data(), model.params().data() + model.params().size());
        if (!result.best_params.empty()) {
            std::copy(result.best_params.begin(), result.best_params.end(), model.params().data());
        }
        model.save_checkpoint(best_path);
        std::copy(last.begin(), last.end(), model.params().data());
    }

    std::string log_path = (fs::path(o.out_dir) / "loss_log.tsv").string();
    {
        std::ofstream log(log_path, std::ios::binary);
        log << "epoch\tloss\tloss_pred\tloss_recon\twall_s\n";
        char buf[160];
        for (const auto& e : result.log) {
            std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\t%.3f\n", e.epoch, e.loss, e.loss_pred,
                          e.loss_recon, e.wall_s);
            log << buf;
        }
    }

    RunManifest m;
    m.command = "train";
    m.seed = cfg.seed;
    m.config = train_config_to_json(cfg);
    m.inputs.emplace_back(data_path, digest_of(data_path));
    if (!o.config_path.empty()) m.inputs.emplace_back(o.config_path, digest_of(o.config_path));
    m.outputs = {last_path, best_path, log_path};
    m.wall_s = timer.seconds();
    write_manifest(m, (fs::path(o.out_dir) / "manifest.json").string());
    std::cerr << "train: best epoch " << result.best_epoch << " loss " << result.best_loss << "\n";
}

namespace {

std::vector<ScoreSeries> score_for_cli(const std::string& checkpoint, const std::string& detector,
                                       const std::vector<Scene>& scenes, double radius, int window_len,
                                       int stride, int mc_samples, uint64_t seed, int jobs) {
    DetectorKind kind;
    if (detector == "model") {
        kind.is_cvm = false;
    } else {
        try {
            kind = detector_from_name(detector);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    std::vector<SceneObservations> obs;
    obs.reserve(scenes.size());
    for (const auto& s : scenes) obs.push_back(build_observations(s, radius));

    ScoreSettings st;
    st.window_len = window_len;
    st.stride = stride;
    st.mc_samples = mc_samples;
    st.seed = seed;
    st.mode = exec_mode_from_jobs(jobs);
    set_omp_threads(jobs);

    if (kind.is_cvm) return score_scenes(nullptr, obs, st);
    if (checkpoint.empty()) throw ConfigError("--checkpoint is required unless --detector cvm is given");
    Model model = Model::load_checkpoint(checkpoint);
    if (detector != "model" && model.config().variant != kind.variant) {
        throw ConfigError("checkpoint holds variant '" + std::string(variant_name(model.config().variant)) +
                          "' but --detector asked for '" + detector + "'");
    }
    return score_scenes(&model, obs, st);
}

}  // namespace

void run_score(const ScoreOpts& o) {
    Timer timer;
    std::string data_path;
    std::vector<Scene> scenes = load_scene_input(o.data, "test.jsonl", &data_path);
    auto series = score_for_cli(o.checkpoint, o.detector, scenes, o.neighbor_radius, o.window_len, o.stride,
                                o.mc_samples, o.seed, o.jobs);

    ensure_dir((fs::path(o.out_dir) / "scores").string());
    std::vector<std::string> outputs;
    for (const auto& s : series) {
        std::string path = (fs::path(o.out_dir) / "scores" / (s.scene_id + ".tsv")).string();
        save_score_series(s, path);
        outputs.push_back(path);
    }

    RunManifest m;
    m.command = "score";
    m.seed = o.seed;
    m.config = {{"detector", o.detector},       {"checkpoint", o.checkpoint}, {"neighbor_radius", o.neighbor_radius},
                {"window_len", o.window_len},   {"stride", o.stride},         {"mc_samples", o.mc_samples},
                {"jobs", o.jobs}};
    m.inputs.emplace_back(data_path, digest_of(data_path));
    if (!o.checkpoint.empty()) m.inputs.emplace_back(o.checkpoint, digest_of(o.checkpoint));
    m.outputs = outputs;
    m.wall_s = timer.seconds();
    write_manifest(m, (fs::path(o.out_dir) / "manifest.json").string());
    std::cerr << "score: wrote " << outputs.size() << " score series\n";
}

void run_evaluate(const EvaluateOpts& o) {
    Timer timer;
    std::vector<ScoreSeries> series;
    RunManifest m;
    m.command = "evaluate";
    m.seed = o.seed;

    if (!o.scores_dir.empty()) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(o.scores_dir)) {
            if (entry.path().extension() == ".tsv") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw SceneIoError("no .tsv score files in '" + o.scores_dir + "'");
        for (const auto& f : files) {
            series.push_back(load_score_series(f));
            m.inputs.emplace_back(f, digest_of(f));
        }
    } else {
        std::string data_path;
        std::vector<Scene> scenes = load_scene_input(o.data, "test.jsonl", &data_path);
        series = score_for_cli(o.checkpoint, o.detector, scenes, o.neighbor_radius, o.window_len, o.stride, 0,
                               o.seed, o.jobs);
        m.inputs.emplace_back(data_path, digest_of(data_path));
        if (!o.checkpoint.empty()) m.inputs.emplace_back(o.checkpoint, digest_of(o.checkpoint));
    }

    if (o.val_fraction > 0.0) {
        // tuning-split evaluation on a seeded subset of scenes; off by default
        size_t keep = std::max<size_t>(1, size_t(std::llround(o.val_fraction * double(series.size()))));
        std::vector<size_t> order(series.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(mix_seed(o.val_seed, 0x76616cULL));
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.bits() % i]);
        order.resize(keep);
        std::sort(order.begin(), order.end());
        std::vector<ScoreSeries> subset;
        for (size_t idx : order) subset.push_back(series[idx]);
        series = std::move(subset);
    }

    MetricReport report = evaluate_scores(series);
    std::string text = format_report(report);

    ensure_dir(o.out_dir);
    std::string report_path = (fs::path(o.out_dir) / "report.txt").string();
    {
        std::ofstream out(report_path, std::ios::binary);
        out << text;
    }
    std::string json_path = (fs::path(o.out_dir) / "metrics.json").string();
    {
        nlohmann::ordered_json j;
        j["auroc"] = report.auroc;
        j["aupr_abnormal"] = report.aupr_abnormal;
        j["aupr_normal"] = report.aupr_normal;
        j["fpr_at_95_tpr"] = report.fpr_at_95_tpr;
        nlohmann::ordered_json types = nlohmann::ordered_json::object();
        for (const auto& [t, auc] : report.per_type_auroc) types[t] = auc;
        j["per_type_auroc"] = types;
        j["points"] = {{"normal", report.n_normal},
                       {"abnormal", report.n_abnormal},
                       {"ignored", report.n_ignored},
                       {"unscored", report.n_unscored}};
        std::ofstream out(json_path, std::ios::binary);
        out << j.dump(2) << '\n';
    }

    m.config = {{"detector", o.detector},
                {"checkpoint", o.checkpoint},
                {"scores_dir", o.scores_dir},
                {"val_fraction", o.val_fraction},
                {"val_seed", o.val_seed}};
    m.outputs = {report_path, json_path};
    m.wall_s = timer.seconds();
    write_manifest(m, (fs::path(o.out_dir) / "manifest.json").string());
    std::cout << text;
}

void run_export_latent(const ExportLatentOpts& o) {
    Timer timer;
    if (o.checkpoint.empty()) throw ConfigError("export-latent needs --checkpoint");
    Model model = Model::load_checkpoint(o.checkpoint);
    std::string data_path;
    std::vector<Scene> scenes = load_scene_input(o.data, "test.jsonl", &data_path);

    ensure_dir(o.out_dir);
    std::string out_path = (fs::path(o.out_dir) / "latent.tsv").string();
    std::ofstream out(out_path, std::ios::binary);
    out << "scene_id\tvehicle\twindow_start\tlocal_t\tt\t";
    const int j = model.config().latent_dim;
    for (int i = 0; i < j; ++i) out << "mu_" << i << '\t';
    for (int i = 0; i < j; ++i) out << "z_" << i << '\t';
    out << "label\n";

    char buf[64];
    for (const auto& scene : scenes) {
        SceneObservations obs = build_observations(scene, o.neighbor_radius);
        auto windows = make_windows(obs, o.window_len, o.stride, nullptr);
        WindowRun run;
        for (const auto& w : windows) {
            if (o.sample && model.config().stochastic()) {
                Rng eps(mix_seed(o.seed, fnv1a64(scene.scene_id), uint64_t(w.start)));
                model.run_window(w, &eps, run);
            } else {
                model.run_window(w, nullptr, run);
            }
            for (int v = 0; v < run.n_veh; ++v) {
                for (int k = 0; k < run.steps; ++k) {
                    const LatentStep& st = run.v[v][k];
                    if (!st.active) continue;
                    int t = w.start + k + 1;  // scene time of the observation
                    out << scene.scene_id << '\t' << v << '\t' << w.start << '\t' << k << '\t' << t << '\t';
                    for (int i = 0; i < j; ++i) {
                        std::snprintf(buf, sizeof(buf), "%.17g\t", st.mu[i]);
                        out << buf;
                    }
                    for (int i = 0; i < j; ++i) {
                        std::snprintf(buf, sizeof(buf), "%.17g\t", st.z_vv[i]);
                        out << buf;
                    }
                    out << label_char(scene.labels[t]) << '\n';
                }
            }
        }
    }
    out.close();

    RunManifest m;
    m.command = "export-latent";
    m.seed = o.seed;
    m.config = {{"checkpoint", o.checkpoint}, {"window_len", o.window_len}, {"stride", o.stride},
                {"sample", o.sample},         {"neighbor_radius", o.neighbor_radius}};
    m.inputs.emplace_back(data_path, digest_of(data_path));
    m.inputs.emplace_back(o.checkpoint, digest_of(o.checkpoint));
    m.outputs = {out_path};
    m.wall_s = timer.seconds();
    write_manifest(m, (fs::path(o.out_dir) / "manifest.json").string());
    std::cerr << "export-latent: wrote " << out_path << "\n";
}

int guarded(void (*fn)(const void*), const void* opts) {
    auto fail = [](int code, const char* kind, const std::string& what) {
        nlohmann::ordered_json j;
        j["error"] = kind;
        j["message"] = what;
        std::cerr << j.dump() << "\n";
        return code;
    };
    try {
        fn(opts);
        return kOkExit;
    } catch (const ConfigError& e) {
        return fail(kConfigExit, "config", e.what());
    } catch (const SceneIoError& e) {
        return fail(kDataExit, "data", e.what());
    } catch (const MetricsError& e) {
        return fail(kSingleClassExit, "single_class", e.what());
    } catch (const CheckpointError& e) {
        return fail(kCheckpointExit, "checkpoint", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kConfigExit, "config", e.what());
    } catch (const std::exception& e) {
        return fail(kInternalExit, "internal", e.what());
    }
}

}  // namespace saber::cli
