#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "saber/loss.hpp"
#include "saber/model.hpp"
#include "saber/scene.hpp"

namespace saber {

struct TrainConfig {
    ModelConfig model;
    double learning_rate = 3e-4;
    int batch_size = 64;
    double kl_pred_weight = 1e-4;   // beta_1
    double kl_recon_weight = 1e-4;  // beta_2
    int epochs = 500;
    double neighbor_radius = 45.0;  // d, meters
    int window_len = 15;            // T'
    int stride = 1;
    uint64_t seed = 7;
    double grad_clip = 5.0;  // global norm
    double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
    int jobs = 1;

    void validate() const;  // includes variant/beta consistency
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0, loss_pred = 0.0, loss_recon = 0.0;
    double wall_s = 0.0;
};

struct TrainResult {
    std::vector<EpochLog> log;
    int best_epoch = -1;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;
    long batches_skipped = 0;
    long lane_warnings = 0;
};

// Observation sequences plus the window list over them. `windows` holds
// pointers into `obs`, which therefore must outlive them.
struct WindowDataset {
    std::vector<SceneObservations> obs;
    std::vector<Window> windows;
    std::vector<WindowingNote> notes;
};

WindowDataset prepare_windows(const std::vector<Scene>& scenes, double neighbor_radius, int window_len,
                              int stride);

// Sliding-window minibatch training. Deterministic given the config seed:
// shuffles, reparameterization draws and initialization all derive from it.
// The model keeps its last-epoch parameters; the best (lowest epoch loss)
// snapshot is returned in the result. `progress` may be null.
TrainResult train(Model& model, const WindowDataset& data, const TrainConfig& cfg, std::ostream* progress);

struct GradCheckEntry {
    std::string tensor;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_tensor;
    int params_checked = 0;
    std::vector<GradCheckEntry> per_tensor;
};

// Central finite differences over every registered parameter against the
// analytic batch gradient. rel = |a-f| / max(|a|, |f|, 1e-4).
GradCheckReport gradient_check(Model& model, const std::vector<Window>& windows, double kl_pred_weight,
                               double kl_recon_weight, uint64_t eps_seed, double fd_step);

}  // namespace saber
