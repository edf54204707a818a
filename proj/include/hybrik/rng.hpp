#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "hybrik/rotmath.hpp"

namespace hybrik {

/// splitmix64-based generator. Self-contained so experiment outputs do not
/// depend on the standard library's engine or distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Box-Muller).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform();
        while (u <= 0.0) {
            u = uniform();
        }
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double a = uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(a), r * std::sin(a), z};
    }

    /// Independent per-coordinate uniform in [-half_extent, half_extent].
    Vec3 uniform_box(double half_extent) {
        return {uniform(-half_extent, half_extent), uniform(-half_extent, half_extent),
                uniform(-half_extent, half_extent)};
    }

    Vec3 normal_vec(double sigma) { return {sigma * normal(), sigma * normal(), sigma * normal()}; }

    /// Haar-uniform rotation via a normalized Gaussian quaternion.
    Rotation rotation() {
        double w, x, y, z, n2;
        do {
            w = normal();
            x = normal();
            y = normal();
            z = normal();
            n2 = w * w + x * x + y * y + z * z;
        } while (n2 < 1e-12);
        const double inv = 1.0 / std::sqrt(n2);
        w *= inv;
        x *= inv;
        y *= inv;
        z *= inv;
        Mat3 m;
        // clang-format off
        m << 1 - 2 * (y * y + z * z),     2 * (x * y - w * z),     2 * (x * z + w * y),
                 2 * (x * y + w * z), 1 - 2 * (x * x + z * z),     2 * (y * z - w * x),
                 2 * (x * z - w * y),     2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        // clang-format on
        return Rotation::from_matrix_unchecked(m);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Decorrelated child seed for (stream, index) under a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    Rng mixer(base ^ (0xA0761D6478BD642FULL * (stream + 1)));
    mixer.next_u64();
    return mixer.next_u64() ^ (0xE7037ED1A0B428DBULL * (index + 1));
}

}  // namespace hybrik
