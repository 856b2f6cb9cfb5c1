#pragma once

// Shared fixtures for the test suites: the named pyramids and seeded random
// generators.

#include <billiards/geometry.hpp>
#include <billiards/special_cases.hpp>

#include <random>

namespace billiards::testing {

using Q = Rational;

inline Tetrahedron<Q> reference_pyramid() { return {{0, 0, 0}, {4, 0, 0}, {2, 4, 0}, {2, 3, 3}}; }
inline Tetrahedron<Q> gravity_pyramid() { return {{0, 0, 0}, {4, 0, 0}, {3, 3, 0}, {2, 1, 3}}; }
inline Tetrahedron<Q> low_apex() { return {{0, 0, 0}, {4, 0, 0}, {3, 3, 0}, {3, 2, 1}}; }
inline Tetrahedron<Q> obtuse_base() { return {{0, 0, 0}, {9, 0, 0}, {6, 3, 0}, {6, 2, 4}}; }
inline Tetrahedron<Q> symmetric_643() { return {{0, 0, 0}, {6, 0, 0}, {3, 4, 0}, {3, 2, 4}}; }

/// Regular tetrahedron in floating point (irrational coordinates).
inline Tetrahedron<double> regular_float() {
    return {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
}

/// Rational tetrahedron whose faces are congruent equilateral triangles;
/// its vertices are alternate corners of the cube [-1,1]^3.
inline Tetrahedron<Q> regular_rational() { return {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}; }

/// Corner pyramid A=(0,0,0), B=(a,0,0), C=(0,b,0), D=(0,0,c) moved by a
/// rational rotation (Cayley transform of a skew matrix) and translation.
inline Tetrahedron<Q> rotated_corner(const Q& a, const Q& b, const Q& c, const Vec3<Q>& w, const Vec3<Q>& shift) {
    // R = (I - W)^-1 (I + W) for skew W; written out via the Rodrigues-like
    // rational formula R = I + 2/(1+|w|^2) (W + W^2).
    const Q s = Q(2) / (Q(1) + norm2(w));
    auto rot = [&](const Vec3<Q>& v) {
        Vec3<Q> wv = cross(w, v);
        return v + s * (wv + cross(w, wv));
    };
    return {shift, shift + rot({a, 0, 0}), shift + rot({0, b, 0}), shift + rot({0, 0, c})};
}

inline Q random_q(std::mt19937_64& rng, int lo, int hi, int den) {
    std::uniform_int_distribution<int> d(lo * den, hi * den);
    return Q(d(rng), den);
}

}  // namespace billiards::testing
