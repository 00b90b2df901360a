#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saber/rng.hpp"

namespace saber {

struct TensorRef {
    int off = 0;
    int rows = 0;
    int cols = 0;  // 1 for vectors
    int size() const { return rows * cols; }
};

struct TensorEntry {
    std::string name;
    TensorRef ref;
    int fan_in = 0;  // 0 = bias-like, initialized to zero
};

// Flat parameter buffer with named tensor views. Gradient and optimizer
// buffers share the same layout; checkpoints and the finite-difference
// harness enumerate the entries table.
class ParamStore {
public:
    TensorRef add_matrix(const std::string& name, int out, int in);
    TensorRef add_vector(const std::string& name, int n);

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    int size() const { return int(data_.size()); }

    const std::vector<TensorEntry>& entries() const { return entries_; }

    // Weights U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero, drawn in
    // registration order.
    void init_uniform_fanin(uint64_t seed);

private:
    std::vector<double> data_;
    std::vector<TensorEntry> entries_;
};

// y = W x + b (W row-major, out x in)
void affine_fwd(const double* W, const double* b, int out, int in, const double* x, double* y);
// dW += dy x^T ; db += dy ; dx += W^T dy (dx may be null)
void affine_bwd(const double* W, int out, int in, const double* x, const double* dy, double* dW, double* db,
                double* dx);

struct Linear {
    TensorRef W, b;
    int in = 0, out = 0;
};

Linear make_linear(ParamStore& ps, const std::string& name, int in, int out);

void linear_fwd(const double* p, const Linear& l, const double* x, double* y);
void linear_bwd(const double* p, const Linear& l, const double* x, const double* dy, double* g, double* dx);

// Two affine layers with tanh in between.
struct Mlp {
    Linear l1, l2;
    int in = 0, hidden = 0, out = 0;
};

struct MlpCache {
    std::vector<double> x;  // input copy
    std::vector<double> t;  // tanh of the first layer
};

Mlp make_mlp(ParamStore& ps, const std::string& name, int in, int hidden, int out);

void mlp_fwd(const double* p, const Mlp& m, const double* x, double* y, MlpCache* cache);
void mlp_bwd(const double* p, const Mlp& m, const MlpCache& cache, const double* dy, double* g, double* dx);

}  // namespace saber
