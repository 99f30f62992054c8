#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace markovgp {

namespace detail {

// splitmix64; used to decorrelate (seed, stream) pairs before seeding the engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic standard-normal generator. mt19937_64 has a standardized
/// output sequence and the Box-Muller transform is computed here explicitly,
/// so draws are bit-identical across platforms for a given (seed, stream).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : NormalSampler(seed, 0) {}

    NormalSampler(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed;
        (void)detail::splitmix64(s);
        s ^= 0x6a09e667f3bcc909ULL * (stream + 1);
        engine_.seed(detail::splitmix64(s));
    }

    /// Uniform draw in (0, 1].
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace markovgp
