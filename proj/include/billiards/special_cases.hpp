#pragma once

// Pyramids where the cycle count is constrained by shape: right trihedral
// corners (no cycles), a right dihedral angle (at most two), mirror
// symmetry (the symmetric cycle is found in closed form), and the bound on
// cycles by the number of obtuse dihedral angles.

#include <billiards/error.hpp>
#include <billiards/geometry.hpp>
#include <billiards/math_cycle.hpp>

#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace billiards {

/// Index of a vertex whose three edges are mutually orthogonal, if any.
template <Scalar T>
std::optional<int> right_corner_vertex(const Tetrahedron<T>& tet) {
    for (int v = 0; v < 4; ++v) {
        std::array<Vec3<T>, 3> e;
        for (int i = 0, k = 0; i < 4; ++i)
            if (i != v) e[k++] = tet.vertex(i) - tet.vertex(v);
        bool right = true;
        for (int i = 0; i < 3 && right; ++i)
            for (int j = i + 1; j < 3 && right; ++j)
                right = ScalarTraits<T>::is_zero(dot(e[i], e[j]), norm(e[i]) * norm(e[j]));
        if (right) return v;
    }
    return std::nullopt;
}

struct CornerReport {
    int corner_vertex = -1;
    std::size_t n_cycles = 0;
    bool ok = false;  // no 4-cycles, as predicted
};

template <Scalar T>
CornerReport check_corner_pyramid(const Tetrahedron<T>& tet) {
    auto corner = right_corner_vertex(tet);
    if (!corner) throw BilliardError(ErrorKind::NotCornerPyramid, "no vertex has three mutually orthogonal edges");
    CornerReport r;
    r.corner_vertex = *corner;
    r.n_cycles = find_cycles(tet).size();
    r.ok = r.n_cycles == 0;
    return r;
}

/// Face pairs meeting at a right dihedral angle.
template <Scalar T>
std::vector<std::pair<Face, Face>> orthogonal_face_pairs(const Tetrahedron<T>& tet) {
    std::vector<std::pair<Face, Face>> out;
    for (Edge e : kAllEdges)
        if (dihedral_cosine_sign(tet, e) == 0) out.push_back(edge_faces(e));
    return out;
}

/// Whether the reflections in the two face planes commute (linear parts).
template <Scalar T>
bool commuting_reflections_check(const Tetrahedron<T>& tet, Face f1, Face f2) {
    const Mat3<T> m1 = reflection_matrix(tet.face_plane(f1));
    const Mat3<T> m2 = reflection_matrix(tet.face_plane(f2));
    const Mat3<T> d = m1 * m2 - m2 * m1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!ScalarTraits<T>::is_zero(d(i, j), 1.0)) return false;
    return true;
}

/// Pyramid symmetric under the reflection swapping A and B, with mirror
/// plane through C, D and the midpoint E of AB.
template <Scalar T>
class SymmetricPyramid {
public:
    explicit SymmetricPyramid(Tetrahedron<T> tet) : tet_(std::move(tet)) {
        const double s2 = tet_.scale() * tet_.scale();
        auto d2 = [&](int i, int j) { return norm2(tet_.vertex(i) - tet_.vertex(j)); };
        if (!ScalarTraits<T>::is_zero(T(d2(0, 3) - d2(1, 3)), s2) || !ScalarTraits<T>::is_zero(T(d2(0, 2) - d2(1, 2)), s2))
            throw BilliardError(ErrorKind::NotSymmetric, "pyramid is not symmetric under swapping A and B");
        e_ = (tet_.A() + tet_.B()) / T(2);
        e_prime_ = reflect_point(tet_.face_plane(Face::ACD), e_);
    }

    [[nodiscard]] const Tetrahedron<T>& tet() const { return tet_; }
    /// Midpoint of AB.
    [[nodiscard]] const Vec3<T>& E() const { return e_; }
    /// E reflected across the plane ACD.
    [[nodiscard]] const Vec3<T>& E_prime() const { return e_prime_; }

    /// Mirror plane CDE.
    [[nodiscard]] Plane<T> mirror_plane() const { return plane_from_points(tet_.C(), tet_.D(), e_); }

private:
    Tetrahedron<T> tet_;
    Vec3<T> e_, e_prime_;
};

/// The symmetric cycle of order ABC -> ACD -> ABD -> BCD, built from the
/// common perpendicular of CE and DE': its foot on CE is the start point and
/// it points along the unfolded path. None when it fails to certify.
template <Scalar T>
std::optional<FourCycle<T>> symmetric_cycle_direct(const SymmetricPyramid<T>& sp) {
    const auto& tet = sp.tet();
    auto feet = common_perpendicular(Line3<T>::through(tet.C(), sp.E()), Line3<T>::through(tet.D(), sp.E_prime()));
    return certify_cycle(tet, ReflectionOrder::canonical(2), feet.on_first, feet.on_second - feet.on_first);
}

struct ConjectureReport {
    int k_obtuse = 0;
    int n_cycles = 0;
    bool verdict = true;  // n_cycles <= 3 - k
};

template <Scalar T>
ConjectureReport conjecture_report(const Tetrahedron<T>& tet) {
    ConjectureReport r;
    r.k_obtuse = count_obtuse_dihedrals(tet);
    r.n_cycles = static_cast<int>(find_cycles(tet).size());
    r.verdict = r.n_cycles <= 3 - r.k_obtuse;
    return r;
}

template <Scalar T>
std::vector<ConjectureReport> conjecture_harness(const std::vector<Tetrahedron<T>>& tets) {
    std::vector<ConjectureReport> out;
    out.reserve(tets.size());
    for (const auto& t : tets) out.push_back(conjecture_report(t));
    return out;
}

/// Seeded random rational pyramid: base and apex with small integer-over-
/// denominator coordinates, apex strictly above the base plane z = 0.
inline Tetrahedron<Rational> random_rational_pyramid(std::mt19937_64& rng, int range = 12, int denominator = 4) {
    std::uniform_int_distribution<int> coord(-range * denominator, range * denominator);
    std::uniform_int_distribution<int> height(1, range * denominator);
    auto q = [&](int n) { return Rational(n, denominator); };
    for (;;) {
        Vec3<Rational> a{q(coord(rng)), q(coord(rng)), Rational(0)};
        Vec3<Rational> b{q(coord(rng)), q(coord(rng)), Rational(0)};
        Vec3<Rational> c{q(coord(rng)), q(coord(rng)), Rational(0)};
        Vec3<Rational> d{q(coord(rng)), q(coord(rng)), q(height(rng))};
        if (cross(b - a, c - a).z.is_zero()) continue;
        if (cross(b - a, c - a).z < Rational(0)) std::swap(b, c);
        return Tetrahedron<Rational>(a, b, c, d);
    }
}

}  // namespace billiards
