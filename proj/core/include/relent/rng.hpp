#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "relent/types.hpp"

namespace relent {

/// Seeded generator with explicit bit-to-double mapping so that streams do
/// not depend on library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {  // Box-Muller, one value per draw pair
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Draws admissible states for a given system. Rejection sampling against the
/// admissibility predicate; gives up loudly rather than silently clamping.
class StateSampler {
public:
    StateSampler(int n, std::function<std::string(const Vec&)> inadmissible, std::uint64_t seed)
        : n_(n), inadmissible_(std::move(inadmissible)), rng_(seed) {}

    /// |U| uniform in [r_lo, r_hi), direction uniform on the sphere.
    Vec draw_shell(double r_lo, double r_hi, int max_tries = 10000);

    Vec draw_ball(double radius, int max_tries = 10000) { return draw_shell(0.0, radius, max_tries); }

    /// Componentwise uniform in the given box.
    Vec draw_box(const std::vector<std::array<double, 2>>& box, int max_tries = 10000);

    Rng& rng() { return rng_; }

private:
    bool ok(const Vec& U) const { return !inadmissible_ || inadmissible_(U).empty(); }

    int n_;
    std::function<std::string(const Vec&)> inadmissible_;
    Rng rng_;
};

}  // namespace relent
