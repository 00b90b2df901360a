#include "saber/loss.hpp"

namespace saber {

WindowSplit split_window(const Window& w, int vehicle) {
    WindowSplit out;
    const auto& seq = w.scene->veh.at(vehicle);
    for (int k = 0; k + 1 < w.length; ++k) {
        const ObsStep& cur = seq[w.start + k];
        const ObsStep& next = seq[w.start + k + 1];
        out.x_minus.push_back(cur.dx);
        out.valid_minus.push_back(cur.valid);
        out.x_plus.push_back(next.dx);
        out.valid_plus.push_back(next.valid);
    }
    return out;
}

BatchResult batch_loss(const Model& model, const std::vector<Window>& windows,
                       const std::vector<uint64_t>& eps_seeds, ExecMode mode) {
    const int n = int(windows.size());
    std::vector<WindowRun> runs(n);
    parallel_for(n, mode, [&](int i) {
        if (!eps_seeds.empty() && model.config().stochastic()) {
            Rng eps(eps_seeds[i]);
            model.run_window(windows[i], &eps, runs[i]);
        } else {
            model.run_window(windows[i], nullptr, runs[i]);
        }
    });
    BatchResult out;
    for (const auto& r : runs) {
        out.terms.sum_rec_err += r.sum_rec_err;
        out.terms.sum_pred_err += r.sum_pred_err;
        out.terms.sum_kl_vv += r.sum_kl_vv;
        out.terms.sum_kl_lv += r.sum_kl_lv;
        out.terms.n_rec += r.n_rec;
        out.terms.n_pred += r.n_pred;
        out.lane_warnings += r.lane_warnings;
    }
    return out;
}

BatchResult batch_gradient(const Model& model, const std::vector<Window>& windows,
                           const std::vector<uint64_t>& eps_seeds, double kl_pred_weight,
                           double kl_recon_weight, ExecMode mode, std::vector<double>& grad) {
    const int n = int(windows.size());
    const int psize = model.params().size();
    grad.assign(psize, 0.0);

    // entry counts depend only on masks, so the loss scales are known before
    // the forward pass and each window can run fully independently
    int n_rec = 0, n_pred = 0;
    for (const auto& w : windows) {
        int r = 0, p = 0;
        model.count_entries(w, &r, &p);
        n_rec += r;
        n_pred += p;
    }
    LossScales scales;
    if (n_rec > 0) {
        scales.rec_err = 1.0 / double(n_rec);
        scales.rec_kl = kl_recon_weight / double(n_rec);
    }
    if (n_pred > 0) {
        scales.pred_err = 1.0 / double(n_pred);
        scales.pred_kl = kl_pred_weight / double(n_pred);
    }

    std::vector<WindowRun> runs(n);
    std::vector<std::vector<double>> wgrads(n);
    parallel_for(n, mode, [&](int i) {
        wgrads[i].assign(psize, 0.0);
        if (!eps_seeds.empty() && model.config().stochastic()) {
            Rng eps(eps_seeds[i]);
            model.run_window(windows[i], &eps, runs[i]);
        } else {
            model.run_window(windows[i], nullptr, runs[i]);
        }
        model.backward_window(windows[i], runs[i], scales, wgrads[i].data());
    });

    BatchResult out;
    for (int i = 0; i < n; ++i) {
        const auto& r = runs[i];
        out.terms.sum_rec_err += r.sum_rec_err;
        out.terms.sum_pred_err += r.sum_pred_err;
        out.terms.sum_kl_vv += r.sum_kl_vv;
        out.terms.sum_kl_lv += r.sum_kl_lv;
        out.terms.n_rec += r.n_rec;
        out.terms.n_pred += r.n_pred;
        out.lane_warnings += r.lane_warnings;
        const double* wg = wgrads[i].data();
        for (int k = 0; k < psize; ++k) grad[k] += wg[k];
    }
    return out;
}

}  // namespace saber
