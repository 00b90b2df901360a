#pragma once

#include <cstdint>
#include <random>

namespace saber {

// splitmix64; used to derive independent stream seeds from a master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL)); }

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c, uint64_t d) { return mix_seed(mix_seed(a, b, c), d); }

// Deterministic random stream. All stochastic paths in the project draw from
// this class so results are replayable from a seed alone; std::*_distribution
// is avoided because its output is implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive range
    int uniform_int(int lo, int hi) {
        return lo + int(eng_() % uint64_t(hi - lo + 1));
    }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double gaussian() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace saber
