#include "saber/recurrent.hpp"

#include <cmath>
#include <stdexcept>

namespace saber {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}

const char* cell_name(CellKind k) { return k == CellKind::Gru ? "gru" : "lstm"; }

CellKind cell_from_name(const std::string& name) {
    if (name == "gru") return CellKind::Gru;
    if (name == "lstm") return CellKind::Lstm;
    throw std::invalid_argument("unknown recurrence cell '" + name + "' (expected gru or lstm)");
}

GruCell make_gru(ParamStore& ps, const std::string& name, int in, int hidden) {
    GruCell c;
    c.in = in;
    c.hidden = hidden;
    c.Wr = ps.add_matrix(name + ".Wr", hidden, in);
    c.Wz = ps.add_matrix(name + ".Wz", hidden, in);
    c.Wn = ps.add_matrix(name + ".Wn", hidden, in);
    c.Ur = ps.add_matrix(name + ".Ur", hidden, hidden);
    c.Uz = ps.add_matrix(name + ".Uz", hidden, hidden);
    c.Un = ps.add_matrix(name + ".Un", hidden, hidden);
    c.br = ps.add_vector(name + ".br", hidden);
    c.bz = ps.add_vector(name + ".bz", hidden);
    c.bn = ps.add_vector(name + ".bn", hidden);
    return c;
}

void gru_fwd(const double* p, const GruCell& c, const double* x, const double* h_prev, double* h_out,
             GruCache* cache) {
    const int H = c.hidden;
    std::vector<double> r(H), z(H), n(H), rh(H);
    auto gate = [&](const TensorRef& W, const TensorRef& U, const TensorRef& b, const double* hin,
                    std::vector<double>& out) {
        affine_fwd(p + W.off, p + b.off, H, c.in, x, out.data());
        const double* u = p + U.off;
        for (int o = 0; o < H; ++o) {
            double acc = 0.0;
            const double* row = u + size_t(o) * H;
            for (int i = 0; i < H; ++i) acc += row[i] * hin[i];
            out[o] += acc;
        }
    };
    gate(c.Wr, c.Ur, c.br, h_prev, r);
    gate(c.Wz, c.Uz, c.bz, h_prev, z);
    for (int i = 0; i < H; ++i) {
        r[i] = sigmoid(r[i]);
        z[i] = sigmoid(z[i]);
        rh[i] = r[i] * h_prev[i];
    }
    gate(c.Wn, c.Un, c.bn, rh.data(), n);
    for (int i = 0; i < H; ++i) {
        n[i] = std::tanh(n[i]);
        h_out[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
    }
    if (cache) {
        cache->x.assign(x, x + c.in);
        cache->h_prev.assign(h_prev, h_prev + H);
        cache->r = std::move(r);
        cache->z = std::move(z);
        cache->n = std::move(n);
    }
}

void gru_bwd(const double* p, const GruCell& c, const GruCache& cc, const double* dh, double* g, double* dx,
             double* dh_prev) {
    const int H = c.hidden;
    std::vector<double> da_r(H), da_z(H), da_n(H), drh(H, 0.0);
    for (int i = 0; i < H; ++i) {
        double dz = dh[i] * (cc.h_prev[i] - cc.n[i]);
        double dn = dh[i] * (1.0 - cc.z[i]);
        dh_prev[i] += dh[i] * cc.z[i];
        da_z[i] = dz * cc.z[i] * (1.0 - cc.z[i]);
        da_n[i] = dn * (1.0 - cc.n[i] * cc.n[i]);
    }
    // n gate: a_n = Wn x + Un (r*h_prev) + bn
    std::vector<double> rh(H);
    for (int i = 0; i < H; ++i) rh[i] = cc.r[i] * cc.h_prev[i];
    affine_bwd(p + c.Wn.off, H, c.in, cc.x.data(), da_n.data(), g + c.Wn.off, g + c.bn.off, dx);
    {
        const double* u = p + c.Un.off;
        double* dU = g + c.Un.off;
        for (int o = 0; o < H; ++o) {
            double gd = da_n[o];
            const double* row = u + size_t(o) * H;
            double* drow = dU + size_t(o) * H;
            for (int i = 0; i < H; ++i) {
                drow[i] += gd * rh[i];
                drh[i] += row[i] * gd;
            }
        }
    }
    for (int i = 0; i < H; ++i) {
        double dr = drh[i] * cc.h_prev[i];
        dh_prev[i] += drh[i] * cc.r[i];
        da_r[i] = dr * cc.r[i] * (1.0 - cc.r[i]);
    }
    auto gate_bwd = [&](const TensorRef& W, const TensorRef& U, const TensorRef& b, const double* da) {
        affine_bwd(p + W.off, H, c.in, cc.x.data(), da, g + W.off, g + b.off, dx);
        const double* u = p + U.off;
        double* dU = g + U.off;
        for (int o = 0; o < H; ++o) {
            double gd = da[o];
            const double* row = u + size_t(o) * H;
            double* drow = dU + size_t(o) * H;
            for (int i = 0; i < H; ++i) {
                drow[i] += gd * cc.h_prev[i];
                dh_prev[i] += row[i] * gd;
            }
        }
    };
    gate_bwd(c.Wr, c.Ur, c.br, da_r.data());
    gate_bwd(c.Wz, c.Uz, c.bz, da_z.data());
}

LstmCell make_lstm(ParamStore& ps, const std::string& name, int in, int hidden) {
    LstmCell c;
    c.in = in;
    c.hidden = hidden;
    c.Wi = ps.add_matrix(name + ".Wi", hidden, in);
    c.Wf = ps.add_matrix(name + ".Wf", hidden, in);
    c.Wg = ps.add_matrix(name + ".Wg", hidden, in);
    c.Wo = ps.add_matrix(name + ".Wo", hidden, in);
    c.Ui = ps.add_matrix(name + ".Ui", hidden, hidden);
    c.Uf = ps.add_matrix(name + ".Uf", hidden, hidden);
    c.Ug = ps.add_matrix(name + ".Ug", hidden, hidden);
    c.Uo = ps.add_matrix(name + ".Uo", hidden, hidden);
    c.bi = ps.add_vector(name + ".bi", hidden);
    c.bf = ps.add_vector(name + ".bf", hidden);
    c.bg = ps.add_vector(name + ".bg", hidden);
    c.bo = ps.add_vector(name + ".bo", hidden);
    return c;
}

void lstm_fwd(const double* p, const LstmCell& c, const double* x, const double* h_prev, const double* c_prev,
              double* h_out, double* c_out, LstmCache* cache) {
    const int H = c.hidden;
    std::vector<double> i(H), f(H), gg(H), o(H);
    auto gate = [&](const TensorRef& W, const TensorRef& U, const TensorRef& b, std::vector<double>& out) {
        affine_fwd(p + W.off, p + b.off, H, c.in, x, out.data());
        const double* u = p + U.off;
        for (int k = 0; k < H; ++k) {
            double acc = 0.0;
            const double* row = u + size_t(k) * H;
            for (int j = 0; j < H; ++j) acc += row[j] * h_prev[j];
            out[k] += acc;
        }
    };
    gate(c.Wi, c.Ui, c.bi, i);
    gate(c.Wf, c.Uf, c.bf, f);
    gate(c.Wg, c.Ug, c.bg, gg);
    gate(c.Wo, c.Uo, c.bo, o);
    for (int k = 0; k < H; ++k) {
        i[k] = sigmoid(i[k]);
        f[k] = sigmoid(f[k]);
        gg[k] = std::tanh(gg[k]);
        o[k] = sigmoid(o[k]);
        c_out[k] = f[k] * c_prev[k] + i[k] * gg[k];
        h_out[k] = o[k] * std::tanh(c_out[k]);
    }
    if (cache) {
        cache->x.assign(x, x + c.in);
        cache->h_prev.assign(h_prev, h_prev + H);
        cache->c_prev.assign(c_prev, c_prev + H);
        cache->i = std::move(i);
        cache->f = std::move(f);
        cache->gg = std::move(gg);
        cache->o = std::move(o);
        cache->c.assign(c_out, c_out + H);
    }
}

void lstm_bwd(const double* p, const LstmCell& c, const LstmCache& cc, const double* dh, const double* dc,
              double* g, double* dx, double* dh_prev, double* dc_prev) {
    const int H = c.hidden;
    std::vector<double> da_i(H), da_f(H), da_g(H), da_o(H);
    for (int k = 0; k < H; ++k) {
        double tc = std::tanh(cc.c[k]);
        double do_ = dh[k] * tc;
        double dct = dc[k] + dh[k] * cc.o[k] * (1.0 - tc * tc);
        double di = dct * cc.gg[k];
        double dgg = dct * cc.i[k];
        double df = dct * cc.c_prev[k];
        dc_prev[k] += dct * cc.f[k];
        da_i[k] = di * cc.i[k] * (1.0 - cc.i[k]);
        da_f[k] = df * cc.f[k] * (1.0 - cc.f[k]);
        da_g[k] = dgg * (1.0 - cc.gg[k] * cc.gg[k]);
        da_o[k] = do_ * cc.o[k] * (1.0 - cc.o[k]);
    }
    auto gate_bwd = [&](const TensorRef& W, const TensorRef& U, const TensorRef& b, const double* da) {
        affine_bwd(p + W.off, H, c.in, cc.x.data(), da, g + W.off, g + b.off, dx);
        const double* u = p + U.off;
        double* dU = g + U.off;
        for (int o = 0; o < H; ++o) {
            double gd = da[o];
            const double* row = u + size_t(o) * H;
            double* drow = dU + size_t(o) * H;
            for (int j = 0; j < H; ++j) {
                drow[j] += gd * cc.h_prev[j];
                dh_prev[j] += row[j] * gd;
            }
        }
    };
    gate_bwd(c.Wi, c.Ui, c.bi, da_i.data());
    gate_bwd(c.Wf, c.Uf, c.bf, da_f.data());
    gate_bwd(c.Wg, c.Ug, c.bg, da_g.data());
    gate_bwd(c.Wo, c.Uo, c.bo, da_o.data());
}

}  // namespace saber
