#include "saber/attention.hpp"

#include <cmath>
#include <limits>

namespace saber {

AttentionNet make_attention(ParamStore& ps, const std::string& name, int dim, int heads) {
    AttentionNet n;
    n.dim = dim;
    n.heads = heads;
    n.q = make_mlp(ps, name + ".q", 2, dim, dim);
    n.k = make_mlp(ps, name + ".k", 2, dim, dim);
    n.v = make_mlp(ps, name + ".v", 2, dim, dim);
    n.merge = make_linear(ps, name + ".merge", dim, dim);
    return n;
}

int attention_fwd(const double* p, const AttentionNet& net, const Vec2& query, const Vec2* keys,
                  const uint8_t* mask, int n_keys, double* out, AttnCache* cache) {
    const int D = net.dim;
    const int H = net.heads;
    const int dh = D / H;

    std::vector<int> idx;
    for (int i = 0; i < n_keys; ++i) {
        if (mask[i]) idx.push_back(i);
    }
    const int m = int(idx.size());
    if (cache) {
        cache->m = m;
        cache->idx = idx;
    }
    if (m == 0) {
        for (int i = 0; i < D; ++i) out[i] = 0.0;
        return 0;
    }

    AttnCache local;
    AttnCache& c = cache ? *cache : local;
    c.q.resize(D);
    c.K.assign(size_t(m) * D, 0.0);
    c.V.assign(size_t(m) * D, 0.0);
    c.w.assign(size_t(H) * m, 0.0);
    c.ctx.assign(D, 0.0);
    c.kc.resize(m);
    c.vc.resize(m);

    double qin[2] = {query.x, query.y};
    mlp_fwd(p, net.q, qin, c.q.data(), &c.qc);
    for (int r = 0; r < m; ++r) {
        double kin[2] = {keys[idx[r]].x, keys[idx[r]].y};
        mlp_fwd(p, net.k, kin, c.K.data() + size_t(r) * D, &c.kc[r]);
        mlp_fwd(p, net.v, kin, c.V.data() + size_t(r) * D, &c.vc[r]);
    }

    const double inv_sqrt_d = 1.0 / std::sqrt(double(D));
    std::vector<double> scores(m);
    for (int h = 0; h < H; ++h) {
        const int lo = h * dh;
        double mx = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            double s = 0.0;
            const double* krow = c.K.data() + size_t(r) * D + lo;
            for (int a = 0; a < dh; ++a) s += c.q[lo + a] * krow[a];
            scores[r] = s * inv_sqrt_d;
            mx = std::max(mx, scores[r]);
        }
        double z = 0.0;
        for (int r = 0; r < m; ++r) {
            scores[r] = std::exp(scores[r] - mx);
            z += scores[r];
        }
        double* w = c.w.data() + size_t(h) * m;
        for (int r = 0; r < m; ++r) {
            w[r] = scores[r] / z;
            const double* vrow = c.V.data() + size_t(r) * D + lo;
            for (int a = 0; a < dh; ++a) c.ctx[lo + a] += w[r] * vrow[a];
        }
    }
    linear_fwd(p, net.merge, c.ctx.data(), out);
    return m;
}

void attention_bwd(const double* p, const AttentionNet& net, const AttnCache& c, const double* dout,
                   double* g) {
    if (c.m == 0) return;  // output was the zero constant
    const int D = net.dim;
    const int H = net.heads;
    const int dh = D / H;
    const int m = c.m;
    const double inv_sqrt_d = 1.0 / std::sqrt(double(D));

    std::vector<double> dctx(D, 0.0);
    linear_bwd(p, net.merge, c.ctx.data(), dout, g, dctx.data());

    std::vector<double> dq(D, 0.0);
    std::vector<double> dK(size_t(m) * D, 0.0);
    std::vector<double> dV(size_t(m) * D, 0.0);
    std::vector<double> dw(m), ds(m);
    for (int h = 0; h < H; ++h) {
        const int lo = h * dh;
        const double* w = c.w.data() + size_t(h) * m;
        double wsum = 0.0;
        for (int r = 0; r < m; ++r) {
            double acc = 0.0;
            const double* vrow = c.V.data() + size_t(r) * D + lo;
            for (int a = 0; a < dh; ++a) {
                dV[size_t(r) * D + lo + a] += w[r] * dctx[lo + a];
                acc += dctx[lo + a] * vrow[a];
            }
            dw[r] = acc;
            wsum += acc * w[r];
        }
        for (int r = 0; r < m; ++r) ds[r] = w[r] * (dw[r] - wsum);
        for (int r = 0; r < m; ++r) {
            const double* krow = c.K.data() + size_t(r) * D + lo;
            for (int a = 0; a < dh; ++a) {
                dq[lo + a] += ds[r] * krow[a] * inv_sqrt_d;
                dK[size_t(r) * D + lo + a] += ds[r] * c.q[lo + a] * inv_sqrt_d;
            }
        }
    }

    mlp_bwd(p, net.q, c.qc, dq.data(), g, nullptr);
    for (int r = 0; r < m; ++r) {
        mlp_bwd(p, net.k, c.kc[r], dK.data() + size_t(r) * D, g, nullptr);
        mlp_bwd(p, net.v, c.vc[r], dV.data() + size_t(r) * D, g, nullptr);
    }
}

}  // namespace saber
