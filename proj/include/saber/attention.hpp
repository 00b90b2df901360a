#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saber/geometry.hpp"
#include "saber/params.hpp"

namespace saber {

// Masked scaled dot-product multi-head attention over 2-D displacement
// inputs: the query comes from a vehicle's own displacement, keys/values
// from a set of relative displacements (neighbors or lane nodes).
struct AttentionNet {
    Mlp q, k, v;
    Linear merge;
    int dim = 0;    // attention size D, divisible by heads
    int heads = 0;
};

AttentionNet make_attention(ParamStore& ps, const std::string& name, int dim, int heads);

struct AttnCache {
    int m = 0;               // unmasked key count
    std::vector<int> idx;    // positions of unmasked keys in the input
    MlpCache qc;
    std::vector<MlpCache> kc, vc;
    std::vector<double> q;   // D
    std::vector<double> K, V;  // m x D, row-major
    std::vector<double> w;   // heads x m softmax weights
    std::vector<double> ctx; // D, concatenated head contexts
};

// out has size D. Masked keys are skipped entirely, which realizes the
// -inf masking exactly: no value of a masked slot can reach the output.
// With zero unmasked keys the output is the zero vector and the merge
// layer is bypassed. Returns the unmasked key count.
int attention_fwd(const double* p, const AttentionNet& net, const Vec2& query, const Vec2* keys,
                  const uint8_t* mask, int n_keys, double* out, AttnCache* cache);

void attention_bwd(const double* p, const AttentionNet& net, const AttnCache& cache, const double* dout,
                   double* g);

}  // namespace saber
