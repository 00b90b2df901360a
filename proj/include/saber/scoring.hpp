#pragma once

#include <string>
#include <vector>

#include "saber/model.hpp"
#include "saber/parallel.hpp"
#include "saber/scene.hpp"

namespace saber {

struct ScoreSettings {
    int window_len = 15;
    int stride = 1;
    int mc_samples = 0;  // 0 -> score with z = mu
    uint64_t seed = 0;   // Monte-Carlo draw seed
    ExecMode mode = ExecMode::Serial;
};

// Per-timestep anomaly scores for one scene, aligned with ground truth.
// Timesteps not covered by any window carry the nearest earlier scored value
// (the earliest one for the leading edge) and scored=0; they are excluded
// from metrics.
struct ScoreSeries {
    std::string scene_id, anomaly_type;
    int n_vehicles = 0;
    int length = 0;  // scene timesteps
    std::vector<double> as;
    std::vector<Label> labels;
    std::vector<uint8_t> scored;
    std::vector<std::vector<double>> veh_err;  // [v][t] overlap-averaged error
    std::vector<std::vector<int>> coverage;    // [v][t] windows covering
};

// Errors of one window: err[v][i] is the error at observation position
// start + target_offset + i (prediction scoring: offset 1, reconstruction
// scoring: offset 0). has[v][i] marks scoreable entries.
struct WindowErrors {
    int start = 0;
    int target_offset = 1;
    std::vector<std::vector<double>> err;
    std::vector<std::vector<uint8_t>> has;
};

// One-step prediction errors (or reconstruction errors for the
// reconstruction-scored variant) of a trained model over one window.
// mc_samples > 0 averages the error over that many reparameterization draws.
WindowErrors window_pred_errors(const Model& model, const Window& w, int mc_samples, uint64_t seed);

// Constant-velocity baseline: predicted next displacement = current one.
WindowErrors window_cvm_errors(const Window& w);

struct OverlapAverage {
    std::vector<std::vector<double>> veh_err;  // [v][obs pos]
    std::vector<std::vector<int>> coverage;
};

// Mean per (vehicle, position) over every window covering it, accumulated
// in window order.
OverlapAverage average_overlaps(const std::vector<WindowErrors>& windows, int n_veh, int obs_len);

// max over vehicles with coverage at this observation position; false if none
bool anomaly_score_at(const OverlapAverage& avg, int pos, double* out);

// model == nullptr selects the constant-velocity baseline.
ScoreSeries score_scene(const Model* model, const SceneObservations& obs, const ScoreSettings& st);

std::vector<ScoreSeries> score_scenes(const Model* model, const std::vector<SceneObservations>& scenes,
                                      const ScoreSettings& st);

// Score-series file round-trip (TSV with a metadata header line).
void save_score_series(const ScoreSeries& s, const std::string& path);
ScoreSeries load_score_series(const std::string& path);

}  // namespace saber
