#include "saber/params.hpp"

#include <cmath>
#include <stdexcept>

namespace saber {

TensorRef ParamStore::add_matrix(const std::string& name, int out, int in) {
    TensorRef r{int(data_.size()), out, in};
    data_.resize(data_.size() + size_t(out) * size_t(in), 0.0);
    entries_.push_back({name, r, in});
    return r;
}

TensorRef ParamStore::add_vector(const std::string& name, int n) {
    TensorRef r{int(data_.size()), n, 1};
    data_.resize(data_.size() + size_t(n), 0.0);
    entries_.push_back({name, r, 0});
    return r;
}

void ParamStore::init_uniform_fanin(uint64_t seed) {
    Rng rng(seed);
    for (const auto& e : entries_) {
        double* p = data_.data() + e.ref.off;
        if (e.fan_in == 0) {
            for (int i = 0; i < e.ref.size(); ++i) p[i] = 0.0;
        } else {
            double bound = 1.0 / std::sqrt(double(e.fan_in));
            for (int i = 0; i < e.ref.size(); ++i) p[i] = rng.uniform(-bound, bound);
        }
    }
}

void affine_fwd(const double* W, const double* b, int out, int in, const double* x, double* y) {
    for (int o = 0; o < out; ++o) {
        double acc = b[o];
        const double* row = W + size_t(o) * in;
        for (int i = 0; i < in; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

void affine_bwd(const double* W, int out, int in, const double* x, const double* dy, double* dW, double* db,
                double* dx) {
    for (int o = 0; o < out; ++o) {
        double g = dy[o];
        db[o] += g;
        double* dwrow = dW + size_t(o) * in;
        const double* wrow = W + size_t(o) * in;
        for (int i = 0; i < in; ++i) {
            dwrow[i] += g * x[i];
            if (dx) dx[i] += wrow[i] * g;
        }
    }
}

Linear make_linear(ParamStore& ps, const std::string& name, int in, int out) {
    Linear l;
    l.in = in;
    l.out = out;
    l.W = ps.add_matrix(name + ".W", out, in);
    l.b = ps.add_vector(name + ".b", out);
    return l;
}

void linear_fwd(const double* p, const Linear& l, const double* x, double* y) {
    affine_fwd(p + l.W.off, p + l.b.off, l.out, l.in, x, y);
}

void linear_bwd(const double* p, const Linear& l, const double* x, const double* dy, double* g, double* dx) {
    affine_bwd(p + l.W.off, l.out, l.in, x, dy, g + l.W.off, g + l.b.off, dx);
}

Mlp make_mlp(ParamStore& ps, const std::string& name, int in, int hidden, int out) {
    Mlp m;
    m.in = in;
    m.hidden = hidden;
    m.out = out;
    m.l1 = make_linear(ps, name + ".1", in, hidden);
    m.l2 = make_linear(ps, name + ".2", hidden, out);
    return m;
}

void mlp_fwd(const double* p, const Mlp& m, const double* x, double* y, MlpCache* cache) {
    std::vector<double> a(m.hidden);
    affine_fwd(p + m.l1.W.off, p + m.l1.b.off, m.hidden, m.in, x, a.data());
    for (double& v : a) v = std::tanh(v);
    affine_fwd(p + m.l2.W.off, p + m.l2.b.off, m.out, m.hidden, a.data(), y);
    if (cache) {
        cache->x.assign(x, x + m.in);
        cache->t = std::move(a);
    }
}

void mlp_bwd(const double* p, const Mlp& m, const MlpCache& cache, const double* dy, double* g, double* dx) {
    std::vector<double> dt(m.hidden, 0.0);
    affine_bwd(p + m.l2.W.off, m.out, m.hidden, cache.t.data(), dy, g + m.l2.W.off, g + m.l2.b.off, dt.data());
    for (int i = 0; i < m.hidden; ++i) dt[i] *= 1.0 - cache.t[i] * cache.t[i];
    affine_bwd(p + m.l1.W.off, m.hidden, m.in, cache.x.data(), dt.data(), g + m.l1.W.off, g + m.l1.b.off, dx);
}

}  // namespace saber
