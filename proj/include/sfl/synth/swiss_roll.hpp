#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/rng.hpp"

namespace sfl::synth {

struct SwissRollSample {
    Matrix points;              // n×3: (t·cos t, h, t·sin t) + noise
    Matrix intrinsic;           // n×2: (arc length along the spiral, h)
    std::vector<double> angle;  // t per point
};

/// Arc length of the spiral r = t from 0 to t.
inline double spiral_arc_length(double t) {
    return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

/// t ~ U[1.5π, 4.5π], h ~ U[0, 21]; isotropic Gaussian noise of the given std.
inline SwissRollSample gen_swiss_roll(std::size_t n, double noise, std::uint64_t seed) {
    require(n >= 10, ErrorKind::invalid_argument, "swiss roll needs n >= 10");
    require(noise >= 0.0, ErrorKind::invalid_argument, "noise must be nonnegative");
    RngStream rng(seed, 0);
    SwissRollSample s{Matrix(n, 3), Matrix(n, 2), std::vector<double>(n)};
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.5 * pi * (1.0 + 2.0 * rng.uniform01());
        const double h = 21.0 * rng.uniform01();
        s.angle[i] = t;
        s.points(i, 0) = t * std::cos(t);
        s.points(i, 1) = h;
        s.points(i, 2) = t * std::sin(t);
        s.intrinsic(i, 0) = spiral_arc_length(t);
        s.intrinsic(i, 1) = h;
    }
    if (noise > 0.0) {
        RngStream jitter(seed, 1);
        for (auto& v : s.points.data()) v += noise * jitter.normal();
    }
    return s;
}

}  // namespace sfl::synth
