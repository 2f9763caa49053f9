#pragma once

#include "peakgeom/types.hpp"

#include <cmath>
#include <cstdint>

namespace peakgeom {

// Deterministic splitmix64 stream. Doubles are built from the raw bits so
// sequences are reproducible across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double gaussian() {
        // Box-Muller; one sample per pair of uniforms keeps the stream
        // independent of caller state.
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    RealVec unit_vector(int d) {
        RealVec v(d);
        double n = 0.0;
        do {
            for (int i = 0; i < d; ++i) v[i] = gaussian();
            n = v.norm();
        } while (n < 1e-12);
        return v / n;
    }

    // uniform in the open ball of given radius
    RealVec in_ball(int d, double radius) {
        RealVec dir = unit_vector(d);
        double r = radius * std::pow(uniform(), 1.0 / double(d));
        return r * dir;
    }

    // derive a decorrelated sub-stream seed
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace peakgeom
