#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace memtrack {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Sub-seed for a per-track noise stream. Keyed by (run seed, slot,
/// creation frame) so a track's draws do not depend on which other tracks
/// exist — the property behind the one-by-one equivalence invariant.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(base ^ mix64(a + 0x632BE59BD9B4E019ull) ^ mix64(b + 0x9E6C63D0876A9A47ull));
}

/// Deterministic random source. mt19937_64 produces a bit-exact stream per
/// the C++ standard; the distributions are hand-rolled because the standard
/// library's distribution algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; two uniforms per call, no caching,
    /// so the draw count per call is fixed.
    double gaussian() {
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;  // (0,1]
        double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;          // [0,1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    /// Scaled normal. sigma == 0 draws nothing and returns exactly 0.0.
    double gaussian(double sigma) { return sigma == 0.0 ? 0.0 : sigma * gaussian(); }

    /// Uniform point on the unit sphere in `dim` dimensions.
    std::vector<double> unit_vector(std::size_t dim) {
        std::vector<double> v(dim);
        while (true) {
            double norm_sq = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] = gaussian();
                norm_sq += v[i] * v[i];
            }
            if (norm_sq > 1e-24) {
                double inv = 1.0 / std::sqrt(norm_sq);
                for (double& c : v) c *= inv;
                return v;
            }
        }
    }

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace memtrack
