#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace otx {

// mt19937_64 with hand-rolled distributions so streams are identical across
// standard library implementations (std distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0,1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1));
    }

    // Box-Muller; one value per call, cache discarded for reproducibility.
    double normal(double mean = 0.0, double sigma = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + sigma * z;
    }

    // Independent child stream, for per-frame / per-band determinism.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(seed * 0x9E3779B97F4A7C15ull + stream * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace otx
