#pragma once

#include <vector>

#include "saber/model.hpp"
#include "saber/parallel.hpp"

namespace saber {

// Current states X- = indices 0..T'-2 and one-step future states
// X+ = indices 1..T'-1 of one vehicle's displacements within a window.
struct WindowSplit {
    std::vector<Vec2> x_minus, x_plus;
    std::vector<uint8_t> valid_minus, valid_plus;
};

WindowSplit split_window(const Window& w, int vehicle);

struct LossTerms {
    double sum_rec_err = 0.0, sum_pred_err = 0.0, sum_kl_vv = 0.0, sum_kl_lv = 0.0;
    int n_rec = 0, n_pred = 0;

    double l_pred(double kl_pred_weight) const {
        if (n_pred == 0) return 0.0;
        return (kl_pred_weight * sum_kl_lv + sum_pred_err) / double(n_pred);
    }
    double l_recon(double kl_recon_weight) const {
        if (n_rec == 0) return 0.0;
        return (kl_recon_weight * sum_kl_vv + sum_rec_err) / double(n_rec);
    }
    double total(double kl_pred_weight, double kl_recon_weight) const {
        return l_pred(kl_pred_weight) + l_recon(kl_recon_weight);
    }
};

struct BatchResult {
    LossTerms terms;
    int lane_warnings = 0;
};

// Forward-only batch loss. eps_seeds (one per window) drive the
// reparameterization draws; pass an empty vector for the z = mu path.
BatchResult batch_loss(const Model& model, const std::vector<Window>& windows,
                       const std::vector<uint64_t>& eps_seeds, ExecMode mode);

// Forward + backward; gradients of the averaged objective are accumulated
// into `grad` (zeroed first). Per-window work runs in parallel, the
// reduction is serial in window order, so both ExecModes are bit-identical.
BatchResult batch_gradient(const Model& model, const std::vector<Window>& windows,
                           const std::vector<uint64_t>& eps_seeds, double kl_pred_weight,
                           double kl_recon_weight, ExecMode mode, std::vector<double>& grad);

}  // namespace saber
