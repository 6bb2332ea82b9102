#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace gincorr {

/// One SplitMix64 step; used only to spread seeds, never as the sample engine.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Well-spread substream seed for (master seed, stream index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t b = splitmix64_next(s);
    return splitmix64_next(s) ^ b;
}

/**
 * Deterministic random stream: mt19937_64 engine plus explicit transforms.
 *
 * The uniform->gaussian conversions are spelled out here (rather than via
 * std::normal_distribution, whose algorithm is implementation-defined) so a
 * (seed, index) pair pins the exact draw sequence.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t master, std::uint64_t index) : engine_(derive_seed(master, index)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_open01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Rejection from the top to avoid modulo bias.
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Two independent N(0,1) reals (Box-Muller).
    std::pair<double, double> gaussian_pair() {
        double u1 = uniform_open01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    /// Standard complex Gaussian: E z = E z^2 = 0, E|z|^2 = 1.
    std::complex<double> gaussian_complex() {
        auto [x, y] = gaussian_pair();
        return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
    }

    /// Uniform phase exp(i theta).
    std::complex<double> uniform_phase() {
        return std::polar(1.0, 2.0 * std::numbers::pi * uniform01());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gincorr
