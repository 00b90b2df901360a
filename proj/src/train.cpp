#include "saber/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace saber {

void TrainConfig::validate() const {
    model.validate();
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(neighbor_radius > 0.0)) throw std::invalid_argument("neighbor_radius must be > 0");
    if (window_len < 2) throw std::invalid_argument("window_len must be >= 2");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (!(grad_clip > 0.0)) throw std::invalid_argument("grad_clip must be > 0");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (!model.stochastic() && (kl_pred_weight != 0.0 || kl_recon_weight != 0.0)) {
        throw std::invalid_argument(std::string("variant ") + variant_name(model.variant) +
                                    " is deterministic; kl weights must be 0");
    }
}

WindowDataset prepare_windows(const std::vector<Scene>& scenes, double neighbor_radius, int window_len,
                              int stride) {
    WindowDataset out;
    out.obs.reserve(scenes.size());
    for (const auto& s : scenes) out.obs.push_back(build_observations(s, neighbor_radius));
    for (const auto& o : out.obs) {
        auto ws = make_windows(o, window_len, stride, &out.notes);
        out.windows.insert(out.windows.end(), ws.begin(), ws.end());
    }
    return out;
}

namespace {

uint64_t window_eps_seed(uint64_t seed, int epoch, size_t window_index) {
    return mix_seed(seed, 0x657073ULL, uint64_t(epoch), uint64_t(window_index));
}

std::string describe_batch(const std::vector<Window>& batch) {
    std::ostringstream os;
    os << batch.size() << " windows:";
    size_t shown = std::min<size_t>(batch.size(), 6);
    for (size_t i = 0; i < shown; ++i) {
        os << ' ' << batch[i].scene->scene_id << '@' << batch[i].start;
    }
    if (batch.size() > shown) os << " ...";
    return os.str();
}

}  // namespace

TrainResult train(Model& model, const WindowDataset& data, const TrainConfig& cfg, std::ostream* progress) {
    cfg.validate();
    TrainResult result;
    const size_t n_windows = data.windows.size();
    if (n_windows == 0) throw std::invalid_argument("no training windows (are all scenes shorter than T'?)");

    const int psize = model.params().size();
    std::vector<double> grad, m1(psize, 0.0), m2(psize, 0.0);
    long adam_t = 0;
    const ExecMode mode = exec_mode_from_jobs(cfg.jobs);
    set_omp_threads(cfg.jobs);

    std::vector<size_t> order(n_windows);
    for (size_t i = 0; i < n_windows; ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng(mix_seed(cfg.seed, 0x73687566ULL, uint64_t(epoch)));
        for (size_t i = n_windows; i > 1; --i) {
            size_t k = size_t(shuffle_rng.bits() % i);
            std::swap(order[i - 1], order[k]);
        }

        double ep_loss = 0.0, ep_pred = 0.0, ep_recon = 0.0;
        int batches = 0;
        for (size_t at = 0; at < n_windows; at += size_t(cfg.batch_size)) {
            size_t hi = std::min(n_windows, at + size_t(cfg.batch_size));
            std::vector<Window> batch;
            std::vector<uint64_t> seeds;
            batch.reserve(hi - at);
            for (size_t i = at; i < hi; ++i) {
                batch.push_back(data.windows[order[i]]);
                seeds.push_back(window_eps_seed(cfg.seed, epoch, order[i]));
            }

            BatchResult br = batch_gradient(model, batch, seeds, cfg.kl_pred_weight, cfg.kl_recon_weight, mode,
                                            grad);
            result.lane_warnings += br.lane_warnings;
            if (br.terms.n_rec == 0 && br.terms.n_pred == 0) {
                ++result.batches_skipped;
                if (progress) *progress << "warning: batch with zero unmasked entries skipped\n";
                continue;
            }
            double L = br.terms.total(cfg.kl_pred_weight, cfg.kl_recon_weight);
            if (!std::isfinite(L)) {
                throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + "; offending batch: " +
                                         describe_batch(batch));
            }

            double norm2 = 0.0;
            for (double gv : grad) norm2 += gv * gv;
            double norm = std::sqrt(norm2);
            if (norm > cfg.grad_clip) {
                double s = cfg.grad_clip / norm;
                for (double& gv : grad) gv *= s;
            }

            ++adam_t;
            double* p = model.params().data();
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, double(adam_t));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, double(adam_t));
            for (int i = 0; i < psize; ++i) {
                m1[i] = cfg.adam_beta1 * m1[i] + (1.0 - cfg.adam_beta1) * grad[i];
                m2[i] = cfg.adam_beta2 * m2[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
                double mh = m1[i] / bc1;
                double vh = m2[i] / bc2;
                p[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_eps);
            }

            ep_loss += L;
            ep_pred += br.terms.l_pred(cfg.kl_pred_weight);
            ep_recon += br.terms.l_recon(cfg.kl_recon_weight);
            ++batches;
        }

        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        EpochLog log;
        log.epoch = epoch;
        log.loss = batches ? ep_loss / batches : 0.0;
        log.loss_pred = batches ? ep_pred / batches : 0.0;
        log.loss_recon = batches ? ep_recon / batches : 0.0;
        log.wall_s = wall;
        result.log.push_back(log);
        if (progress) {
            *progress << "epoch " << epoch << " loss " << log.loss << " pred " << log.loss_pred << " recon "
                      << log.loss_recon << " (" << wall << " s)\n";
        }
        if (log.loss < result.best_loss && batches > 0) {
            result.best_loss = log.loss;
            result.best_epoch = epoch;
            const double* p = model.params().data();
            result.best_params.assign(p, p + psize);
        }
    }
    return result;
}

GradCheckReport gradient_check(Model& model, const std::vector<Window>& windows, double kl_pred_weight,
                               double kl_recon_weight, uint64_t eps_seed, double fd_step) {
    std::vector<uint64_t> seeds(windows.size());
    for (size_t i = 0; i < windows.size(); ++i) seeds[i] = mix_seed(eps_seed, uint64_t(i));

    std::vector<double> analytic;
    batch_gradient(model, windows, seeds, kl_pred_weight, kl_recon_weight, ExecMode::Serial, analytic);

    auto loss_at = [&]() {
        BatchResult br = batch_loss(model, windows, seeds, ExecMode::Serial);
        return br.terms.total(kl_pred_weight, kl_recon_weight);
    };

    GradCheckReport report;
    double* p = model.params().data();
    for (const auto& e : model.params().entries()) {
        GradCheckEntry entry;
        entry.tensor = e.name;
        for (int i = 0; i < e.ref.size(); ++i) {
            const int idx = e.ref.off + i;
            const double saved = p[idx];
            p[idx] = saved + fd_step;
            double lp = loss_at();
            p[idx] = saved - fd_step;
            double lm = loss_at();
            p[idx] = saved;
            double fd = (lp - lm) / (2.0 * fd_step);
            double a = analytic[idx];
            double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-4});
            entry.max_rel_err = std::max(entry.max_rel_err, rel);
            ++report.params_checked;
        }
        if (entry.max_rel_err > report.max_rel_err) {
            report.max_rel_err = entry.max_rel_err;
            report.worst_tensor = entry.tensor;
        }
        report.per_tensor.push_back(entry);
    }
    return report;
}

}  // namespace saber
