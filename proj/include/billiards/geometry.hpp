#pragma once

// Planes, reflections, triangles, barycentric coordinates and the labeled
// tetrahedron ABCD. Every routine is generic over the scalar backend.

#include <billiards/error.hpp>
#include <billiards/linalg.hpp>
#include <billiards/scalar.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace billiards {

template <Scalar T>
double norm(const Vec3<T>& v) {
    return std::sqrt(to_double(norm2(v)));
}

template <Scalar T>
Vec3<double> to_double(const Vec3<T>& v) {
    return {to_double(v.x), to_double(v.y), to_double(v.z)};
}

template <Scalar T>
Vec3<T> vec3_from_double(const Vec3<double>& v) {
    return {scalar_from_double<T>(v.x), scalar_from_double<T>(v.y), scalar_from_double<T>(v.z)};
}

/// {p : normal . p + offset = 0}. The normal is never normalized.
template <Scalar T>
struct Plane {
    Vec3<T> normal;
    T offset{};

    [[nodiscard]] T evaluate(const Vec3<T>& p) const { return dot(normal, p) + offset; }

    [[nodiscard]] Plane flipped() const { return {-normal, -offset}; }

    /// Same plane with the normal pointing to the side containing `ref`.
    [[nodiscard]] Plane oriented_toward(const Vec3<T>& ref) const {
        return evaluate(ref) < T(0) ? flipped() : *this;
    }
};

template <Scalar T>
Plane<T> plane_from_points(const Vec3<T>& p, const Vec3<T>& q, const Vec3<T>& r) {
    Vec3<T> n = cross(q - p, r - p);
    if (is_zero_vector(n)) throw BilliardError(ErrorKind::DegenerateInput, "plane through collinear points");
    return {n, -dot(n, p)};
}

/// Linear part of the reflection in `plane`: I - 2 n n^T / (n^T n).
template <Scalar T>
Mat3<T> reflection_matrix(const Plane<T>& plane) {
    const Vec3<T>& n = plane.normal;
    if (is_zero_vector(n)) throw BilliardError(ErrorKind::ZeroNormal, "reflection in a plane with zero normal");
    T s = T(2) / norm2(n);
    Mat3<T> r = Mat3<T>::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] -= s * n[i] * n[j];
    return r;
}

template <Scalar T>
Vec3<T> reflect_vector(const Plane<T>& plane, const Vec3<T>& v) {
    const Vec3<T>& n = plane.normal;
    if (is_zero_vector(n)) throw BilliardError(ErrorKind::ZeroNormal, "reflection in a plane with zero normal");
    return v - (T(2) * dot(v, n) / norm2(n)) * n;
}

template <Scalar T>
Vec3<T> reflect_point(const Plane<T>& plane, const Vec3<T>& p) {
    const Vec3<T>& n = plane.normal;
    if (is_zero_vector(n)) throw BilliardError(ErrorKind::ZeroNormal, "reflection in a plane with zero normal");
    return p - (T(2) * plane.evaluate(p) / norm2(n)) * n;
}

template <Scalar T>
struct Barycentric {
    T x{}, y{}, z{};

    friend bool operator==(const Barycentric&, const Barycentric&) = default;
};

template <Scalar T>
struct Triangle {
    Vec3<T> a, b, c;

    [[nodiscard]] Vec3<T> normal() const { return cross(b - a, c - a); }

    [[nodiscard]] double scale() const {
        return std::max({norm(b - a), norm(c - b), norm(a - c)});
    }
};

template <Scalar T>
Vec3<T> point_from_barycentric(const Triangle<T>& tri, const Barycentric<T>& w) {
    return w.x * tri.a + w.y * tri.b + w.z * tri.c;
}

/// Weights of `p` with respect to `tri`. Throws if the triangle is degenerate
/// or `p` is off the triangle's plane (exactly, or beyond 1e-9 of the
/// triangle's size on floats).
template <Scalar T>
Barycentric<T> barycentric_of(const Triangle<T>& tri, const Vec3<T>& p) {
    const Vec3<T> n = tri.normal();
    const T nn = norm2(n);
    if (is_zero_vector(n)) throw BilliardError(ErrorKind::DegenerateInput, "degenerate triangle");
    const T height = dot(n, p - tri.a);
    if constexpr (ScalarTraits<T>::exact) {
        if (!height.is_zero()) throw BilliardError(ErrorKind::OffPlane, "point is not in the triangle's plane");
    } else {
        if (std::fabs(height) / std::sqrt(nn) > ScalarTraits<T>::tolerance * tri.scale())
            throw BilliardError(ErrorKind::OffPlane, "point is not in the triangle's plane");
    }
    Barycentric<T> w;
    w.x = dot(cross(tri.b - p, tri.c - p), n) / nn;
    w.y = dot(cross(tri.c - p, tri.a - p), n) / nn;
    w.z = T(1) - w.x - w.y;
    return w;
}

template <Scalar T>
bool barycentric_strictly_positive(const Barycentric<T>& w) {
    return ScalarTraits<T>::sign(w.x) > 0 && ScalarTraits<T>::sign(w.y) > 0 && ScalarTraits<T>::sign(w.z) > 0;
}

template <Scalar T>
bool point_in_triangle_strict(const Triangle<T>& tri, const Vec3<T>& p) {
    return barycentric_strictly_positive(barycentric_of(tri, p));
}

enum class Face : int { ABC = 0, ABD = 1, ACD = 2, BCD = 3 };
inline constexpr std::array<Face, 4> kAllFaces{Face::ABC, Face::ABD, Face::ACD, Face::BCD};

inline constexpr std::array<int, 3> face_vertices(Face f) {
    switch (f) {
        case Face::ABC: return {0, 1, 2};
        case Face::ABD: return {0, 1, 3};
        case Face::ACD: return {0, 2, 3};
        case Face::BCD: return {1, 2, 3};
    }
    return {0, 1, 2};
}

/// Index of the vertex not on face `f`.
inline constexpr int opposite_vertex(Face f) { return 3 - static_cast<int>(f); }

inline std::string face_name(Face f) {
    static constexpr const char* names[] = {"ABC", "ABD", "ACD", "BCD"};
    return names[static_cast<int>(f)];
}

inline Face face_from_name(const std::string& s) {
    std::string sorted = s;
    std::sort(sorted.begin(), sorted.end());
    for (Face f : kAllFaces)
        if (face_name(f) == sorted) return f;
    throw BilliardError(ErrorKind::InvalidArgument, "unknown face \"" + s + "\"");
}

enum class Edge : int { AB, AC, AD, BC, BD, CD };
inline constexpr std::array<Edge, 6> kAllEdges{Edge::AB, Edge::AC, Edge::AD, Edge::BC, Edge::BD, Edge::CD};

inline constexpr std::pair<int, int> edge_vertices(Edge e) {
    switch (e) {
        case Edge::AB: return {0, 1};
        case Edge::AC: return {0, 2};
        case Edge::AD: return {0, 3};
        case Edge::BC: return {1, 2};
        case Edge::BD: return {1, 3};
        case Edge::CD: return {2, 3};
    }
    return {0, 1};
}

inline std::string edge_name(Edge e) {
    static constexpr const char* names[] = {"AB", "AC", "AD", "BC", "BD", "CD"};
    return names[static_cast<int>(e)];
}

/// The two faces meeting along `e`: each omits one of the two other vertices.
inline constexpr std::pair<Face, Face> edge_faces(Edge e) {
    auto [i, j] = edge_vertices(e);
    int others[2];
    int k = 0;
    for (int v = 0; v < 4; ++v)
        if (v != i && v != j) others[k++] = v;
    // The face opposite vertex v is Face(3 - v).
    return {static_cast<Face>(3 - others[0]), static_cast<Face>(3 - others[1])};
}

/// Labeled tetrahedron ABCD, non-degenerate by construction.
template <Scalar T>
class Tetrahedron {
public:
    Tetrahedron(Vec3<T> a, Vec3<T> b, Vec3<T> c, Vec3<T> d) : v_{std::move(a), std::move(b), std::move(c), std::move(d)} {
        bool flat = false;
        if constexpr (ScalarTraits<T>::exact) {
            flat = signed_volume6().is_zero();
        } else {
            double l = scale();
            flat = !(std::fabs(signed_volume6()) > 1e-12 * l * l * l);
        }
        if (flat)
            throw BilliardError(ErrorKind::DegenerateInput, "tetrahedron has zero volume");
    }

    /// Canonical pose: base in z = 0 with vertices given in the plane, apex
    /// above the foot `foot` at height `h` > 0.
    static Tetrahedron canonical(const Vec2<T>& a, const Vec2<T>& b, const Vec2<T>& c, const Vec2<T>& foot,
                                 const T& h) {
        if (!(h > T(0))) throw BilliardError(ErrorKind::InvalidArgument, "height must be positive");
        return Tetrahedron({a.x, a.y, T(0)}, {b.x, b.y, T(0)}, {c.x, c.y, T(0)}, {foot.x, foot.y, h});
    }

    [[nodiscard]] const Vec3<T>& vertex(int i) const { return v_[i]; }
    [[nodiscard]] const Vec3<T>& A() const { return v_[0]; }
    [[nodiscard]] const Vec3<T>& B() const { return v_[1]; }
    [[nodiscard]] const Vec3<T>& C() const { return v_[2]; }
    [[nodiscard]] const Vec3<T>& D() const { return v_[3]; }
    [[nodiscard]] const std::array<Vec3<T>, 4>& vertices() const { return v_; }

    /// Six times the signed volume.
    [[nodiscard]] T signed_volume6() const { return dot(cross(v_[1] - v_[0], v_[2] - v_[0]), v_[3] - v_[0]); }

    [[nodiscard]] Triangle<T> face_triangle(Face f) const {
        auto idx = face_vertices(f);
        return {v_[idx[0]], v_[idx[1]], v_[idx[2]]};
    }

    /// Face plane with its normal directed into the solid.
    [[nodiscard]] Plane<T> face_plane(Face f) const {
        auto idx = face_vertices(f);
        return plane_from_points(v_[idx[0]], v_[idx[1]], v_[idx[2]]).oriented_toward(v_[opposite_vertex(f)]);
    }

    /// Largest edge length; the length scale for float tolerances.
    [[nodiscard]] double scale() const {
        double s = 0;
        for (Edge e : kAllEdges) {
            auto [i, j] = edge_vertices(e);
            s = std::max(s, norm(v_[i] - v_[j]));
        }
        return s;
    }

    [[nodiscard]] Tetrahedron<double> to_float() const {
        return {billiards::to_double(v_[0]), billiards::to_double(v_[1]), billiards::to_double(v_[2]),
                billiards::to_double(v_[3])};
    }

private:
    std::array<Vec3<T>, 4> v_;
};

/// Interior dihedral angle along `e`, in radians.
template <Scalar T>
double dihedral_angle(const Tetrahedron<T>& tet, Edge e) {
    auto [f1, f2] = edge_faces(e);
    Vec3<double> n1 = to_double(tet.face_plane(f1).normal);
    Vec3<double> n2 = to_double(tet.face_plane(f2).normal);
    double c = -dot(n1, n2) / std::sqrt(norm2(n1) * norm2(n2));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Sign of cos(dihedral angle) along `e`: +1 acute, 0 right, -1 obtuse.
/// Exact on the rational backend.
template <Scalar T>
int dihedral_cosine_sign(const Tetrahedron<T>& tet, Edge e) {
    auto [f1, f2] = edge_faces(e);
    Plane<T> p1 = tet.face_plane(f1);
    Plane<T> p2 = tet.face_plane(f2);
    T d = -dot(p1.normal, p2.normal);
    if constexpr (ScalarTraits<T>::exact) {
        return d.sign();
    } else {
        double scale = std::sqrt(norm2(p1.normal) * norm2(p2.normal));
        return ScalarTraits<T>::sign(d / scale);
    }
}

struct DihedralAngle {
    Edge edge;
    double radians;
};

template <Scalar T>
std::array<DihedralAngle, 6> dihedral_angles(const Tetrahedron<T>& tet) {
    std::array<DihedralAngle, 6> out{};
    for (std::size_t i = 0; i < kAllEdges.size(); ++i) out[i] = {kAllEdges[i], dihedral_angle(tet, kAllEdges[i])};
    return out;
}

template <Scalar T>
int count_obtuse_dihedrals(const Tetrahedron<T>& tet) {
    int k = 0;
    for (Edge e : kAllEdges) k += dihedral_cosine_sign(tet, e) < 0 ? 1 : 0;
    return k;
}

template <Scalar T>
struct Line3 {
    Vec3<T> point;
    Vec3<T> direction;

    static Line3 through(const Vec3<T>& p, const Vec3<T>& q) {
        if (p == q) throw BilliardError(ErrorKind::DegenerateInput, "line through coincident points");
        return {p, q - p};
    }

    [[nodiscard]] Vec3<T> at(const T& s) const { return point + s * direction; }
};

template <Scalar T>
struct PerpendicularFeet {
    Vec3<T> on_first;
    Vec3<T> on_second;
    T param_first{};
    T param_second{};
};

/// Closest points of two skew lines. Parallel and intersecting inputs are
/// rejected with distinct error kinds.
template <Scalar T>
PerpendicularFeet<T> common_perpendicular(const Line3<T>& l1, const Line3<T>& l2) {
    if (is_zero_vector(l1.direction) || is_zero_vector(l2.direction))
        throw BilliardError(ErrorKind::DegenerateInput, "line with zero direction");
    const Vec3<T> w = l1.point - l2.point;
    const Vec3<T> dd = cross(l1.direction, l2.direction);
    const T a = norm2(l1.direction);
    const T b = dot(l1.direction, l2.direction);
    const T c = norm2(l2.direction);
    const T d = dot(l1.direction, w);
    const T e = dot(l2.direction, w);
    const T denom = a * c - b * b;
    const T triple = dot(w, dd);
    if constexpr (ScalarTraits<T>::exact) {
        if (denom.is_zero()) throw BilliardError(ErrorKind::ParallelLines, "lines are parallel");
        if (triple.is_zero()) throw BilliardError(ErrorKind::IntersectingLines, "lines intersect");
    } else {
        if (denom <= ScalarTraits<T>::tolerance * a * c)
            throw BilliardError(ErrorKind::ParallelLines, "lines are parallel");
        double scale = std::max({std::sqrt(norm2(w)), std::sqrt(a), std::sqrt(c), 1e-300});
        if (std::fabs(triple) / std::sqrt(norm2(dd)) <= ScalarTraits<T>::tolerance * scale)
            throw BilliardError(ErrorKind::IntersectingLines, "lines intersect");
    }
    const T s = (b * e - c * d) / denom;
    const T t = (a * e - b * d) / denom;
    return {l1.at(s), l2.at(t), s, t};
}

}  // namespace billiards
