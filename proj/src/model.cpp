#include "saber/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "saber/hashing.hpp"

namespace saber {

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'A', 'B', 'E', 'R', 'C', 'P', '1'};

const char* kVariantNames[5] = {"saber_vae", "saber_ae", "vv_rae", "rae_pred", "rae_recon"};

// mu_next = K mu + mu with K tridiagonal from band entries
void band_residual_matvec(const double* raw, const double* v, int j, double* out) {
    const double* diag = raw;
    const double* super = raw + j;
    const double* sub = raw + 2 * j - 1;
    for (int i = 0; i < j; ++i) {
        double acc = v[i] + diag[i] * v[i];
        if (i + 1 < j) acc += super[i] * v[i + 1];
        if (i > 0) acc += sub[i - 1] * v[i - 1];
        out[i] = acc;
    }
}

// accumulates d(raw) and d(v) for out = K v + v
void band_residual_matvec_bwd(const double* raw, const double* v, int j, const double* dout, double* draw,
                              double* dv) {
    const double* diag = raw;
    const double* super = raw + j;
    const double* sub = raw + 2 * j - 1;
    double* ddiag = draw;
    double* dsuper = draw + j;
    double* dsub = draw + 2 * j - 1;
    for (int i = 0; i < j; ++i) {
        ddiag[i] += dout[i] * v[i];
        dv[i] += dout[i] * (1.0 + diag[i]);
        if (i + 1 < j) {
            dsuper[i] += dout[i] * v[i + 1];
            dv[i + 1] += dout[i] * super[i];
        }
        if (i > 0) {
            dsub[i - 1] += dout[i] * v[i - 1];
            dv[i - 1] += dout[i] * sub[i - 1];
        }
    }
}

inline double clamp_sigma(double s) { return std::min(std::max(s, kSigmaFloor), kSigmaCeil); }

inline bool sigma_interior(double s) { return s > kSigmaFloor && s < kSigmaCeil; }

// d||e||/de = e/||e||, zero at the origin
inline void norm_bwd(const double* e, double n, double scale, double* de) {
    if (n > 1e-300) {
        de[0] = scale * e[0] / n;
        de[1] = scale * e[1] / n;
    } else {
        de[0] = de[1] = 0.0;
    }
}

}  // namespace

const char* variant_name(Variant v) { return kVariantNames[int(v)]; }

Variant variant_from_name(const std::string& name) {
    for (int i = 0; i < 5; ++i) {
        if (name == kVariantNames[i]) return Variant(i);
    }
    throw std::invalid_argument("unknown variant '" + name +
                                "' (expected saber_vae, saber_ae, vv_rae, rae_pred or rae_recon)");
}

void ModelConfig::validate() const {
    if (attn_dim < 1) throw std::invalid_argument("attn_dim must be >= 1");
    if (heads < 1) throw std::invalid_argument("heads must be >= 1");
    if (attn_dim % heads != 0) throw std::invalid_argument("attn_dim must be divisible by heads");
    if (latent_dim < 1) throw std::invalid_argument("latent_dim must be >= 1");
    if (rnn_hidden < 0) throw std::invalid_argument("rnn_hidden must be >= 0");
}

std::string ModelConfig::canonical_json() const {
    std::string s = "{\"variant\":\"";
    s += variant_name(variant);
    s += "\",\"attn_dim\":" + std::to_string(attn_dim);
    s += ",\"heads\":" + std::to_string(heads);
    s += ",\"latent_dim\":" + std::to_string(latent_dim);
    s += ",\"rnn_hidden\":" + std::to_string(rnn_hidden);
    s += ",\"cell\":\"";
    s += cell_name(cell);
    s += "\"}";
    return s;
}

uint64_t ModelConfig::hash() const { return fnv1a64(canonical_json()); }

ModelConfig ModelConfig::from_canonical_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ModelConfig c;
    c.variant = variant_from_name(j.at("variant").get<std::string>());
    c.attn_dim = j.at("attn_dim").get<int>();
    c.heads = j.at("heads").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.rnn_hidden = j.at("rnn_hidden").get<int>();
    c.cell = cell_from_name(j.at("cell").get<std::string>());
    c.validate();
    return c;
}

Model::Model(const ModelConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    register_params();
}

void Model::register_params() {
    const int D = cfg_.attn_dim;
    const int H = cfg_.hidden();
    const int j = cfg_.latent_dim;
    const int enc_in = encoder_input_dim();

    if (cfg_.uses_vv_attention()) vv_ = make_attention(ps_, "vv", D, cfg_.heads);
    if (cfg_.uses_lane_attention()) lv_ = make_attention(ps_, "lv", D, cfg_.heads);
    fe_ = make_mlp(ps_, "fe", enc_in, D, D);
    if (cfg_.cell == CellKind::Gru) {
        gru_ = make_gru(ps_, "rnn", D, H);
    } else {
        lstm_ = make_lstm(ps_, "rnn", D, H);
    }
    fmu_ = make_mlp(ps_, "fmu", H, D, j);
    if (cfg_.stochastic()) fsig_ = make_mlp(ps_, "fsig", H, D, j);
    if (cfg_.uses_koopman()) {
        auxmu_ = make_mlp(ps_, "auxmu", j + D, D, 3 * j - 2);
        if (cfg_.stochastic()) auxsig_ = make_mlp(ps_, "auxsig", j + D, D, 3 * j - 2);
    } else if (cfg_.uses_propagation()) {
        fprop_ = make_mlp(ps_, "fprop", j, D, j);
    }
    fdec_ = make_mlp(ps_, "fdec", j, D, 2);
}

double kl_std_normal(const double* mu, const double* sigma, int j) {
    double acc = 0.0;
    for (int i = 0; i < j; ++i) {
        acc += 0.5 * (mu[i] * mu[i] + sigma[i] * sigma[i] - 1.0 - 2.0 * std::log(sigma[i]));
    }
    return acc;
}

std::vector<EncodeStep> Model::encode_sequence(const std::vector<std::vector<double>>& inputs) const {
    const int H = cfg_.hidden();
    const int j = cfg_.latent_dim;
    const double* p = ps_.data();
    std::vector<EncodeStep> out;
    out.reserve(inputs.size());
    std::vector<double> h(H, 0.0), c(H, 0.0), emb(cfg_.attn_dim), h_next(H), c_next(H);
    for (size_t t = 0; t < inputs.size(); ++t) {
        const auto& x = inputs[t];
        if (int(x.size()) != encoder_input_dim()) {
            throw std::invalid_argument("encode_sequence: input width mismatch at timestep " + std::to_string(t));
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("encode_sequence: non-finite input embedding at timestep " +
                                            std::to_string(t));
            }
        }
        mlp_fwd(p, fe_, x.data(), emb.data(), nullptr);
        if (cfg_.cell == CellKind::Gru) {
            gru_fwd(p, gru_, emb.data(), h.data(), h_next.data(), nullptr);
        } else {
            lstm_fwd(p, lstm_, emb.data(), h.data(), c.data(), h_next.data(), c_next.data(), nullptr);
            c = c_next;
        }
        h = h_next;
        EncodeStep step;
        step.h = h;
        step.mu.resize(j);
        mlp_fwd(p, fmu_, h.data(), step.mu.data(), nullptr);
        if (cfg_.stochastic()) {
            step.sigma.resize(j);
            mlp_fwd(p, fsig_, h.data(), step.sigma.data(), nullptr);
            for (double& s : step.sigma) s = clamp_sigma(std::exp(s));
        }
        out.push_back(std::move(step));
    }
    return out;
}

std::vector<double> Model::build_tridiagonal(const std::vector<double>& raw, int j) {
    if (int(raw.size()) != 3 * j - 2) {
        throw std::invalid_argument("tridiagonal bands need 3j-2 = " + std::to_string(3 * j - 2) +
                                    " entries, got " + std::to_string(raw.size()));
    }
    std::vector<double> K(size_t(j) * j, 0.0);
    for (int i = 0; i < j; ++i) K[size_t(i) * j + i] = raw[i];
    for (int i = 0; i + 1 < j; ++i) {
        K[size_t(i) * j + i + 1] = raw[j + i];      // superdiagonal
        K[size_t(i + 1) * j + i] = raw[2 * j - 1 + i];  // subdiagonal
    }
    return K;
}

void Model::koopman_propagate(const double* mu, const double* sigma, const double* plv, double* mu_next,
                              double* sig_next) const {
    if (!cfg_.uses_koopman()) throw std::logic_error("variant has no lane-conditioned propagation");
    const int j = cfg_.latent_dim;
    const int D = cfg_.attn_dim;
    const double* p = ps_.data();
    std::vector<double> in(j + D), raw(3 * j - 2);
    std::copy(mu, mu + j, in.begin());
    std::copy(plv, plv + D, in.begin() + j);
    mlp_fwd(p, auxmu_, in.data(), raw.data(), nullptr);
    band_residual_matvec(raw.data(), mu, j, mu_next);
    if (sigma && sig_next) {
        if (!cfg_.stochastic()) throw std::logic_error("deterministic variant has no deviation path");
        std::copy(sigma, sigma + j, in.begin());
        mlp_fwd(p, auxsig_, in.data(), raw.data(), nullptr);
        band_residual_matvec(raw.data(), sigma, j, sig_next);
        for (int i = 0; i < j; ++i) sig_next[i] = clamp_sigma(std::abs(sig_next[i]));
    }
}

void Model::sample_latent(const double* mu, const double* sigma, const double* eps, int j, double* z) {
    for (int i = 0; i < j; ++i) z[i] = mu[i] + eps[i] * sigma[i];
}

std::vector<double> Model::decode(const double* z) const {
    std::vector<double> out(2);
    mlp_fwd(ps_.data(), fdec_, z, out.data(), nullptr);
    return out;
}

void Model::count_entries(const Window& w, int* n_rec, int* n_pred) const {
    int rec = 0, pred = 0;
    const int steps = w.length - 1;
    for (int v = 0; v < w.scene->n_vehicles; ++v) {
        const auto& seq = w.scene->veh[v];
        for (int k = 0; k < steps; ++k) {
            if (!seq[w.start + k].valid) continue;
            ++rec;
            if (cfg_.uses_propagation() && seq[w.start + k + 1].valid) ++pred;
        }
    }
    *n_rec = rec;
    *n_pred = pred;
}

void Model::run_window(const Window& w, Rng* eps, WindowRun& out) const {
    const int D = cfg_.attn_dim;
    const int H = cfg_.hidden();
    const int j = cfg_.latent_dim;
    const int steps = w.length - 1;
    const int n_veh = w.scene->n_vehicles;
    const double* p = ps_.data();
    const bool stoch = cfg_.stochastic();

    out = WindowRun{};
    out.n_veh = n_veh;
    out.steps = steps;
    out.v.assign(n_veh, std::vector<LatentStep>(steps));

    std::vector<double> h(H), c(H), h_next(H), c_next(H);
    std::vector<double> aux_in(j + D);

    for (int v = 0; v < n_veh; ++v) {
        const auto& seq = w.scene->veh[v];
        std::fill(h.begin(), h.end(), 0.0);
        std::fill(c.begin(), c.end(), 0.0);
        for (int k = 0; k < steps; ++k) {
            LatentStep& st = out.v[v][k];
            if (stoch && eps) {
                st.eps_vv.resize(j);
                st.eps_lv.resize(j);
                for (int i = 0; i < j; ++i) st.eps_vv[i] = eps->gaussian();
                for (int i = 0; i < j; ++i) st.eps_lv[i] = eps->gaussian();
            }
            const ObsStep& obs = seq[w.start + k];
            if (!obs.valid) continue;  // hidden state carries through
            st.active = true;

            double query[2] = {obs.dx.x, obs.dx.y};
            const double* enc_in = query;
            if (cfg_.uses_vv_attention()) {
                st.pvv.resize(D);
                attention_fwd(p, vv_, obs.dx, obs.nbr.data(), obs.nbr_mask.data(), int(obs.nbr.size()),
                              st.pvv.data(), &st.vv_c);
                enc_in = st.pvv.data();
            }
            st.emb.resize(D);
            mlp_fwd(p, fe_, enc_in, st.emb.data(), &st.fe_c);
            st.h.resize(H);
            if (cfg_.cell == CellKind::Gru) {
                gru_fwd(p, gru_, st.emb.data(), h.data(), st.h.data(), &st.gru_c);
            } else {
                st.c.resize(H);
                lstm_fwd(p, lstm_, st.emb.data(), h.data(), c.data(), st.h.data(), st.c.data(), &st.lstm_c);
                c = st.c;
            }
            h = st.h;

            st.mu.resize(j);
            mlp_fwd(p, fmu_, h.data(), st.mu.data(), &st.mu_c);
            if (stoch) {
                st.sig.resize(j);
                mlp_fwd(p, fsig_, h.data(), st.sig.data(), &st.sig_c);
                for (int i = 0; i < j; ++i) st.sig[i] = clamp_sigma(std::exp(st.sig[i]));
                st.kl_vv = kl_std_normal(st.mu.data(), st.sig.data(), j);
                out.sum_kl_vv += st.kl_vv;
            }

            // reconstruction of the current displacement
            st.z_vv.resize(j);
            if (stoch && eps) {
                sample_latent(st.mu.data(), st.sig.data(), st.eps_vv.data(), j, st.z_vv.data());
            } else {
                st.z_vv = st.mu;
            }
            mlp_fwd(p, fdec_, st.z_vv.data(), st.xhat_rec, &st.dec_rec_c);
            double er[2] = {st.xhat_rec[0] - obs.dx.x, st.xhat_rec[1] - obs.dx.y};
            st.rec_err = std::hypot(er[0], er[1]);
            out.sum_rec_err += st.rec_err;
            ++out.n_rec;

            // one-step prediction of the next displacement
            const ObsStep& next = seq[w.start + k + 1];
            if (!cfg_.uses_propagation() || !next.valid) continue;
            st.pred_active = true;

            if (cfg_.uses_koopman()) {
                st.plv.resize(D);
                Vec2 lane_keys[3];
                uint8_t lane_mask[3];
                for (int s = 0; s < 3; ++s) {
                    lane_mask[s] = obs.lane.mask[s] ? 1 : 0;
                    if (obs.lane.mask[s]) lane_keys[s] = obs.lane.disp[s];
                }
                int lm = attention_fwd(p, lv_, obs.dx, lane_keys, lane_mask, 3, st.plv.data(), &st.lv_c);
                if (lm == 0) {
                    st.lane_warned = true;
                    ++out.lane_warnings;
                }
                std::copy(st.mu.begin(), st.mu.end(), aux_in.begin());
                std::copy(st.plv.begin(), st.plv.end(), aux_in.begin() + j);
                st.kmu_raw.resize(3 * j - 2);
                mlp_fwd(p, auxmu_, aux_in.data(), st.kmu_raw.data(), &st.auxmu_c);
                st.mu_next.resize(j);
                band_residual_matvec(st.kmu_raw.data(), st.mu.data(), j, st.mu_next.data());
                if (stoch) {
                    std::copy(st.sig.begin(), st.sig.end(), aux_in.begin());
                    st.ksig_raw.resize(3 * j - 2);
                    mlp_fwd(p, auxsig_, aux_in.data(), st.ksig_raw.data(), &st.auxsig_c);
                    st.sig_pre.resize(j);
                    band_residual_matvec(st.ksig_raw.data(), st.sig.data(), j, st.sig_pre.data());
                    st.sig_next.resize(j);
                    for (int i = 0; i < j; ++i) st.sig_next[i] = clamp_sigma(std::abs(st.sig_pre[i]));
                }
            } else {
                st.mu_next.resize(j);
                mlp_fwd(p, fprop_, st.mu.data(), st.mu_next.data(), &st.prop_c);
            }

            st.z_lv.resize(j);
            if (stoch && eps) {
                sample_latent(st.mu_next.data(), st.sig_next.data(), st.eps_lv.data(), j, st.z_lv.data());
            } else {
                st.z_lv = st.mu_next;
            }
            mlp_fwd(p, fdec_, st.z_lv.data(), st.xhat_pred, &st.dec_pred_c);
            double ep[2] = {st.xhat_pred[0] - next.dx.x, st.xhat_pred[1] - next.dx.y};
            st.pred_err = std::hypot(ep[0], ep[1]);
            out.sum_pred_err += st.pred_err;
            ++out.n_pred;
            if (stoch) {
                st.kl_lv = kl_std_normal(st.mu_next.data(), st.sig_next.data(), j);
                out.sum_kl_lv += st.kl_lv;
            }
        }
    }
}

void Model::backward_window(const Window& w, const WindowRun& run, const LossScales& scales, double* g) const {
    const int D = cfg_.attn_dim;
    const int H = cfg_.hidden();
    const int j = cfg_.latent_dim;
    const double* p = ps_.data();
    const bool stoch = cfg_.stochastic();

    std::vector<double> dh_carry(H), dc_carry(H), dh(H), dmu(j), dsig(j), dsig_raw(j);
    std::vector<double> dmu_next(j), dsig_next(j), dsig_pre(j), dz(j);
    std::vector<double> dplv(D), draw(3 * j - 2), daux_in(j + D), demb(D), dpvv(D);

    for (int v = 0; v < run.n_veh; ++v) {
        const auto& seq = w.scene->veh[v];
        std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
        std::fill(dc_carry.begin(), dc_carry.end(), 0.0);
        for (int k = run.steps - 1; k >= 0; --k) {
            const LatentStep& st = run.v[v][k];
            if (!st.active) continue;
            std::fill(dmu.begin(), dmu.end(), 0.0);
            std::fill(dsig.begin(), dsig.end(), 0.0);
            std::fill(dplv.begin(), dplv.end(), 0.0);
            bool have_plv_grad = false;

            if (st.pred_active) {
                const ObsStep& next = seq[w.start + k + 1];
                double ep[2] = {st.xhat_pred[0] - next.dx.x, st.xhat_pred[1] - next.dx.y};
                double dxhat[2];
                norm_bwd(ep, st.pred_err, scales.pred_err, dxhat);
                std::fill(dz.begin(), dz.end(), 0.0);
                mlp_bwd(p, fdec_, st.dec_pred_c, dxhat, g, dz.data());

                for (int i = 0; i < j; ++i) dmu_next[i] = dz[i];
                if (stoch) {
                    for (int i = 0; i < j; ++i) {
                        dmu_next[i] += scales.pred_kl * st.mu_next[i];
                        dsig_next[i] = scales.pred_kl * (st.sig_next[i] - 1.0 / st.sig_next[i]);
                        if (!st.eps_lv.empty()) dsig_next[i] += dz[i] * st.eps_lv[i];
                    }
                }

                if (cfg_.uses_koopman()) {
                    std::fill(draw.begin(), draw.end(), 0.0);
                    band_residual_matvec_bwd(st.kmu_raw.data(), st.mu.data(), j, dmu_next.data(), draw.data(),
                                             dmu.data());
                    std::fill(daux_in.begin(), daux_in.end(), 0.0);
                    mlp_bwd(p, auxmu_, st.auxmu_c, draw.data(), g, daux_in.data());
                    for (int i = 0; i < j; ++i) dmu[i] += daux_in[i];
                    for (int i = 0; i < D; ++i) dplv[i] += daux_in[j + i];
                    have_plv_grad = true;

                    if (stoch) {
                        for (int i = 0; i < j; ++i) {
                            bool interior = sigma_interior(std::abs(st.sig_pre[i]));
                            dsig_pre[i] = interior ? dsig_next[i] * (st.sig_pre[i] < 0.0 ? -1.0 : 1.0) : 0.0;
                        }
                        std::fill(draw.begin(), draw.end(), 0.0);
                        band_residual_matvec_bwd(st.ksig_raw.data(), st.sig.data(), j, dsig_pre.data(),
                                                 draw.data(), dsig.data());
                        std::fill(daux_in.begin(), daux_in.end(), 0.0);
                        mlp_bwd(p, auxsig_, st.auxsig_c, draw.data(), g, daux_in.data());
                        for (int i = 0; i < j; ++i) dsig[i] += daux_in[i];
                        for (int i = 0; i < D; ++i) dplv[i] += daux_in[j + i];
                    }
                } else {
                    mlp_bwd(p, fprop_, st.prop_c, dmu_next.data(), g, dmu.data());
                }
            }

            {
                const ObsStep& obs = seq[w.start + k];
                double er[2] = {st.xhat_rec[0] - obs.dx.x, st.xhat_rec[1] - obs.dx.y};
                double dxhat[2];
                norm_bwd(er, st.rec_err, scales.rec_err, dxhat);
                std::fill(dz.begin(), dz.end(), 0.0);
                mlp_bwd(p, fdec_, st.dec_rec_c, dxhat, g, dz.data());
                for (int i = 0; i < j; ++i) dmu[i] += dz[i];
                if (stoch) {
                    for (int i = 0; i < j; ++i) {
                        dmu[i] += scales.rec_kl * st.mu[i];
                        dsig[i] += scales.rec_kl * (st.sig[i] - 1.0 / st.sig[i]);
                        if (!st.eps_vv.empty()) dsig[i] += dz[i] * st.eps_vv[i];
                    }
                }
            }

            std::copy(dh_carry.begin(), dh_carry.end(), dh.begin());
            mlp_bwd(p, fmu_, st.mu_c, dmu.data(), g, dh.data());
            if (stoch) {
                for (int i = 0; i < j; ++i) dsig_raw[i] = sigma_interior(st.sig[i]) ? dsig[i] * st.sig[i] : 0.0;
                mlp_bwd(p, fsig_, st.sig_c, dsig_raw.data(), g, dh.data());
            }

            std::fill(demb.begin(), demb.end(), 0.0);
            std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
            if (cfg_.cell == CellKind::Gru) {
                gru_bwd(p, gru_, st.gru_c, dh.data(), g, demb.data(), dh_carry.data());
            } else {
                std::vector<double> dc_prev(H, 0.0);
                lstm_bwd(p, lstm_, st.lstm_c, dh.data(), dc_carry.data(), g, demb.data(), dh_carry.data(),
                         dc_prev.data());
                dc_carry = dc_prev;
            }

            if (cfg_.uses_vv_attention()) {
                std::fill(dpvv.begin(), dpvv.end(), 0.0);
                mlp_bwd(p, fe_, st.fe_c, demb.data(), g, dpvv.data());
                attention_bwd(p, vv_, st.vv_c, dpvv.data(), g);
            } else {
                mlp_bwd(p, fe_, st.fe_c, demb.data(), g, nullptr);
            }
            if (have_plv_grad) attention_bwd(p, lv_, st.lv_c, dplv.data(), g);
        }
    }
}

void Model::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
    auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&](uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    out.write(kCheckpointMagic, 8);
    put_u32(1);
    put_u64(cfg_.hash());
    std::string cj = cfg_.canonical_json();
    put_u32(uint32_t(cj.size()));
    out.write(cj.data(), std::streamsize(cj.size()));
    put_u32(uint32_t(ps_.entries().size()));
    for (const auto& e : ps_.entries()) {
        put_u32(uint32_t(e.name.size()));
        out.write(e.name.data(), std::streamsize(e.name.size()));
        put_u32(uint32_t(e.ref.rows));
        put_u32(uint32_t(e.ref.cols));
        out.write(reinterpret_cast<const char*>(ps_.data() + e.ref.off), std::streamsize(e.ref.size() * 8));
    }
    if (!out) throw CheckpointError("write failed for '" + path + "'");
}

Model Model::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
    auto get_u32 = [&]() {
        uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&]() {
        uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) throw CheckpointError("'" + path + "' is not a checkpoint");
    uint32_t version = get_u32();
    if (version != 1) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    uint64_t stored_hash = get_u64();
    uint32_t cj_len = get_u32();
    std::string cj(cj_len, '\0');
    in.read(cj.data(), cj_len);
    ModelConfig cfg;
    try {
        cfg = ModelConfig::from_canonical_json(cj);
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("bad checkpoint config: ") + e.what());
    }
    if (cfg.hash() != stored_hash) throw CheckpointError("checkpoint config hash mismatch");

    Model model(cfg);
    uint32_t count = get_u32();
    if (count != model.ps_.entries().size()) throw CheckpointError("checkpoint tensor table mismatch");
    for (const auto& e : model.ps_.entries()) {
        uint32_t name_len = get_u32();
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        uint32_t rows = get_u32();
        uint32_t cols = get_u32();
        if (name != e.name || int(rows) != e.ref.rows || int(cols) != e.ref.cols) {
            throw CheckpointError("checkpoint tensor mismatch at '" + name + "' (expected '" + e.name + "')");
        }
        in.read(reinterpret_cast<char*>(model.ps_.data() + e.ref.off), std::streamsize(e.ref.size() * 8));
    }
    if (!in) throw CheckpointError("truncated checkpoint '" + path + "'");
    return model;
}

}  // namespace saber
