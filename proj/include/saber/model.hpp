#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "saber/attention.hpp"
#include "saber/params.hpp"
#include "saber/recurrent.hpp"
#include "saber/rng.hpp"
#include "saber/scene.hpp"

// Detector model. The recurrent encoder lifts each vehicle's interaction
// features into a latent Gaussian state; in that lifted space the dynamics
// advance linearly, one step at a time, through tridiagonal matrices
// predicted from the current state and the lane embedding (a learned
// stochastic Koopman operator). The decoder is the inverse lift: it maps
// latent samples back to displacement space, with shared parameters for
// reconstructing the current displacement and predicting the next one.

namespace saber {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Variant : int { SaberVae = 0, SaberAe, VvRae, RaePred, RaeRecon };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelConfig {
    Variant variant = Variant::SaberVae;
    int attn_dim = 32;   // attention size D; also the MLP hidden width
    int heads = 8;
    int latent_dim = 2;  // j
    int rnn_hidden = 0;  // 0 -> attn_dim
    CellKind cell = CellKind::Gru;

    int hidden() const { return rnn_hidden > 0 ? rnn_hidden : attn_dim; }
    bool uses_vv_attention() const { return variant != Variant::RaePred && variant != Variant::RaeRecon; }
    bool uses_lane_attention() const { return variant == Variant::SaberVae || variant == Variant::SaberAe; }
    bool stochastic() const { return variant == Variant::SaberVae; }
    bool uses_koopman() const { return variant == Variant::SaberVae || variant == Variant::SaberAe; }
    bool uses_propagation() const { return variant != Variant::RaeRecon; }
    // reconstruction-loss scoring instead of one-step prediction scoring
    bool scores_reconstruction() const { return variant == Variant::RaeRecon; }

    void validate() const;
    std::string canonical_json() const;
    uint64_t hash() const;
    static ModelConfig from_canonical_json(const std::string& json_text);
};

constexpr double kSigmaFloor = 1e-6;
constexpr double kSigmaCeil = 1e6;

// Per-vehicle per-step forward state kept for the backward pass.
struct LatentStep {
    bool active = false;       // observation valid at this step
    bool pred_active = false;  // && next observation valid && variant propagates
    bool lane_warned = false;

    AttnCache vv_c, lv_c;
    MlpCache fe_c, mu_c, sig_c;
    GruCache gru_c;
    LstmCache lstm_c;
    MlpCache auxmu_c, auxsig_c, prop_c, dec_rec_c, dec_pred_c;

    std::vector<double> pvv, plv, emb, h, c;
    std::vector<double> mu, sig;
    std::vector<double> kmu_raw, ksig_raw;  // tridiagonal bands, 3j-2 entries
    std::vector<double> mu_next, sig_pre, sig_next;
    std::vector<double> eps_vv, eps_lv, z_vv, z_lv;
    double xhat_rec[2] = {0, 0}, xhat_pred[2] = {0, 0};
    double rec_err = 0.0, pred_err = 0.0;  // Euclidean norms
    double kl_vv = 0.0, kl_lv = 0.0;
};

struct WindowRun {
    int n_veh = 0;
    int steps = 0;  // T' - 1 encoded steps
    std::vector<std::vector<LatentStep>> v;
    double sum_rec_err = 0.0, sum_pred_err = 0.0, sum_kl_vv = 0.0, sum_kl_lv = 0.0;
    int n_rec = 0, n_pred = 0;
    int lane_warnings = 0;
};

// Per-entry loss weights; the batch runner sets these to beta / count so the
// backward pass produces gradients of the averaged objective directly.
struct LossScales {
    double rec_err = 0.0, rec_kl = 0.0, pred_err = 0.0, pred_kl = 0.0;
};

struct EncodeStep {
    std::vector<double> h, mu, sigma;
};

class Model {
public:
    explicit Model(const ModelConfig& cfg);

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() { return ps_; }
    const ParamStore& params() const { return ps_; }

    void init_params(uint64_t seed) { ps_.init_uniform_fanin(seed); }

    // GRU/LSTM encoder over a sequence of embedding-net inputs (each of the
    // encoder input width: D with attention, 2 without). h_0 = 0.
    std::vector<EncodeStep> encode_sequence(const std::vector<std::vector<double>>& inputs) const;

    // Materializes the j x j matrix (row-major) from band entries laid out
    // as [diagonal j, superdiagonal j-1, subdiagonal j-1].
    static std::vector<double> build_tridiagonal(const std::vector<double>& raw, int j);

    // Forward-only residual propagation (Koopman path); sigma/sig_next may be
    // null for the deterministic mean-only path.
    void koopman_propagate(const double* mu, const double* sigma, const double* plv, double* mu_next,
                           double* sig_next) const;

    static void sample_latent(const double* mu, const double* sigma, const double* eps, int j, double* z);

    std::vector<double> decode(const double* z) const;

    // Full forward over one window. `eps` supplies the reparameterization
    // draws (two latent vectors per vehicle-step, drawn whether or not the
    // step is valid so consumption depends only on the window size); pass
    // null for the z = mu path.
    void run_window(const Window& w, Rng* eps, WindowRun& out) const;

    // Accumulates d(loss)/d(params) into `grad` for the per-entry weighted
    // loss defined by `scales`.
    void backward_window(const Window& w, const WindowRun& run, const LossScales& scales, double* grad) const;

    // Valid entry counts without running the model (they depend only on
    // presence masks and the variant).
    void count_entries(const Window& w, int* n_rec, int* n_pred) const;

    void save_checkpoint(const std::string& path) const;
    static Model load_checkpoint(const std::string& path);

    int encoder_input_dim() const { return cfg_.uses_vv_attention() ? cfg_.attn_dim : 2; }

private:
    ModelConfig cfg_;
    ParamStore ps_;

    AttentionNet vv_, lv_;
    Mlp fe_, fmu_, fsig_, auxmu_, auxsig_, fprop_, fdec_;
    GruCell gru_;
    LstmCell lstm_;

    void register_params();
};

double kl_std_normal(const double* mu, const double* sigma, int j);

}  // namespace saber
