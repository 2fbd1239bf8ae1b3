#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "eqzero/numerics.hpp"

namespace eqzero {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}
} // namespace detail

/// Counter-seeded splitmix64 stream.  Each Monte Carlo trial owns its own
/// generator derived from (master seed, trial index), so results are
/// bit-identical regardless of worker count or execution order.
class TrialRng {
public:
    TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
        : state_(detail::mix64(master_seed ^
                               detail::mix64(0x9E3779B97F4A7C15ULL * (trial_index + 1)))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard complex normal: E a = 0, E|a|^2 = 1, E a^2 = 0 (real and
    /// imaginary parts independent N(0, 1/2)).
    Complex next_complex_gaussian() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-std::log1p(-u1));
        return r * Complex(std::cos(tau * u2), std::sin(tau * u2));
    }

private:
    std::uint64_t state_;
};

} // namespace eqzero
