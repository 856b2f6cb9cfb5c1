#pragma once

// Period-4 trajectories of the straight-line billiard in a tetrahedron.
//
// A 4-cycle leaves the base ABC, bounces off the three lateral faces in a
// fixed order and returns to its starting point with its starting direction.
// The pipeline is: compose the four reflections into a rotation, take its
// axis as the flight direction, unfold the tetrahedron along the order to
// turn the trajectory into a straight segment F -> F1, solve for the start F
// on ABC, and finally certify by forward simulation.

#include <billiards/error.hpp>
#include <billiards/geometry.hpp>
#include <billiards/linear_solve.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace billiards {

/// Cyclic order of faces visited by a 4-cycle, written from the base:
/// ABC -> faces[1] -> faces[2] -> faces[3] -> ABC.
class ReflectionOrder {
public:
    /// The three orders up to reversal, numbered 1..3:
    ///   1: ABC -> ABD -> ACD -> BCD
    ///   2: ABC -> ACD -> ABD -> BCD
    ///   3: ABC -> ABD -> BCD -> ACD
    static ReflectionOrder canonical(int index) {
        switch (index) {
            case 1: return ReflectionOrder(Face::ABD, Face::ACD, Face::BCD);
            case 2: return ReflectionOrder(Face::ACD, Face::ABD, Face::BCD);
            case 3: return ReflectionOrder(Face::ABD, Face::BCD, Face::ACD);
            default: throw BilliardError(ErrorKind::InvalidArgument, "reflection order index must be 1, 2 or 3");
        }
    }

    static std::array<ReflectionOrder, 3> all() { return {canonical(1), canonical(2), canonical(3)}; }

    /// Lateral faces in visiting order; must be a permutation of ABD, ACD, BCD.
    ReflectionOrder(Face first, Face second, Face third) : faces_{Face::ABC, first, second, third} {
        std::array<bool, 4> seen{};
        for (Face f : faces_) {
            if (seen[static_cast<int>(f)])
                throw BilliardError(ErrorKind::InvalidArgument, "reflection order must visit every face once");
            seen[static_cast<int>(f)] = true;
        }
    }

    /// Parses "ABC,ABD,ACD,BCD", "ABD,ACD,BCD" or "ABC->ABD->...". The base
    /// may appear at the start and/or the end.
    static ReflectionOrder parse(const std::string& text) {
        std::vector<Face> faces;
        std::string token;
        auto flush = [&] {
            if (!token.empty()) faces.push_back(face_from_name(token));
            token.clear();
        };
        for (char ch : text) {
            if (std::isalpha(static_cast<unsigned char>(ch)))
                token += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            else
                flush();
        }
        flush();
        if (!faces.empty() && faces.front() == Face::ABC) faces.erase(faces.begin());
        if (!faces.empty() && faces.back() == Face::ABC) faces.pop_back();
        if (faces.size() != 3) throw BilliardError(ErrorKind::InvalidArgument, "cannot parse reflection order \"" + text + "\"");
        return ReflectionOrder(faces[0], faces[1], faces[2]);
    }

    /// faces()[0] is always ABC.
    [[nodiscard]] const std::array<Face, 4>& faces() const { return faces_; }

    /// Faces in the order they are hit after leaving the base; ends with ABC.
    [[nodiscard]] std::array<Face, 4> bounce_faces() const { return {faces_[1], faces_[2], faces_[3], Face::ABC}; }

    [[nodiscard]] ReflectionOrder reversed() const { return ReflectionOrder(faces_[3], faces_[2], faces_[1]); }

    /// 1..3, identifying an order with its reverse.
    [[nodiscard]] int canonical_index() const {
        for (int i = 1; i <= 3; ++i) {
            ReflectionOrder c = canonical(i);
            if (c == *this || c == reversed()) return i;
        }
        return 0;  // unreachable: every valid order is one of the three up to reversal
    }

    [[nodiscard]] std::string str() const {
        std::string s;
        for (Face f : faces_) s += face_name(f) + "->";
        return s + "ABC";
    }

    friend bool operator==(const ReflectionOrder&, const ReflectionOrder&) = default;

private:
    std::array<Face, 4> faces_;
};

/// M = M_ABC * M_f3 * M_f2 * M_f1: the linear part of one full circuit.
template <Scalar T>
Mat3<T> cycle_rotation_matrix(const Tetrahedron<T>& tet, const ReflectionOrder& order) {
    Mat3<T> m = Mat3<T>::identity();
    for (Face f : order.bounce_faces()) m = reflection_matrix(tet.face_plane(f)) * m;
    return m;
}

namespace detail {

inline mpz_class lcm_of_denominators(const Vec3<Rational>& v) {
    mpz_class l = 1;
    for (int i = 0; i < 3; ++i) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v[i].denominator().get_mpz_t());
    return l;
}

/// Scales an exact vector to coprime integers with its first nonzero
/// coordinate positive.
inline Vec3<Rational> primitive_integer_vector(const Vec3<Rational>& v) {
    mpz_class l = lcm_of_denominators(v);
    std::array<mpz_class, 3> ints;
    mpz_class g = 0;
    for (int i = 0; i < 3; ++i) {
        mpq_class scaled = v[i].raw() * l;
        ints[i] = scaled.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
    }
    int first_sign = 0;
    for (int i = 0; i < 3 && first_sign == 0; ++i) first_sign = sgn(ints[i]);
    if (first_sign < 0) g = -g;
    return {Rational(mpz_class(ints[0] / g)), Rational(mpz_class(ints[1] / g)), Rational(mpz_class(ints[2] / g))};
}

}  // namespace detail

/// Fixed direction of a rotation M != I: spans the null space of M - I.
///
/// Exact backend: coprime integer coordinates. Float backend: unit length.
/// In both cases the first nonzero coordinate is positive.
template <Scalar T>
Vec3<T> rotation_axis(const Mat3<T>& m) {
    const Mat3<T> k = m - Mat3<T>::identity();
    const std::array<Vec3<T>, 3> rows{k.row(0), k.row(1), k.row(2)};
    const std::array<Vec3<T>, 3> candidates{cross(rows[0], rows[1]), cross(rows[0], rows[2]), cross(rows[1], rows[2])};

    if constexpr (ScalarTraits<T>::exact) {
        if (is_zero_vector(rows[0]) && is_zero_vector(rows[1]) && is_zero_vector(rows[2]))
            throw BilliardError(ErrorKind::IdentityRotation, "composition of reflections is the identity");
        for (const auto& c : candidates)
            if (!is_zero_vector(c)) return detail::primitive_integer_vector(c);
        throw BilliardError(ErrorKind::AxisNotUnique, "eigenvalue-1 eigenspace has dimension > 1");
    } else {
        double row_scale = 0.0;
        for (const auto& r : rows) row_scale = std::max(row_scale, std::sqrt(norm2(r)));
        if (row_scale <= 1e-12)
            throw BilliardError(ErrorKind::IdentityRotation, "composition of reflections is the identity");
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (norm2(candidates[i]) > norm2(candidates[best])) best = i;
        double len = std::sqrt(norm2(candidates[best]));
        if (len <= 1e-10 * row_scale * row_scale)
            throw BilliardError(ErrorKind::AxisNotUnique, "eigenvalue-1 eigenspace has dimension > 1");
        Vec3<double> axis = candidates[best] / len;
        for (int i = 0; i < 3; ++i) {
            if (std::fabs(axis[i]) > 1e-12) {
                if (axis[i] < 0) axis = -axis;
                break;
            }
        }
        return axis;
    }
}

/// Successive mirror images of the tetrahedron across the lateral faces of
/// an order. steps[i] holds all four vertex images after i + 1 reflections.
template <Scalar T>
struct UnfoldedChain {
    std::array<std::array<Vec3<T>, 4>, 3> steps;

    [[nodiscard]] const Vec3<T>& A1() const { return steps[2][0]; }
    [[nodiscard]] const Vec3<T>& B1() const { return steps[2][1]; }
    [[nodiscard]] const Vec3<T>& C1() const { return steps[2][2]; }
    [[nodiscard]] Triangle<T> base_image() const { return {A1(), B1(), C1()}; }
};

template <Scalar T>
UnfoldedChain<T> unfold(const Tetrahedron<T>& tet, const ReflectionOrder& order) {
    UnfoldedChain<T> chain;
    std::array<Vec3<T>, 4> current = tet.vertices();
    for (int step = 0; step < 3; ++step) {
        auto idx = face_vertices(order.faces()[step + 1]);
        Plane<T> mirror = plane_from_points(current[idx[0]], current[idx[1]], current[idx[2]]);
        for (auto& v : current) v = reflect_point(mirror, v);
        chain.steps[step] = current;
    }
    return chain;
}

template <Scalar T>
struct StartPoint {
    Barycentric<T> weights;
    Vec3<T> point;       // F on ABC
    Vec3<T> image;       // F1 on A1B1C1, same weights
    Vec3<T> axis;        // rotation axis used for the solve
    T axis_multiple{};   // F1 - F = axis_multiple * axis
};

/// Solves x(A1-A) + y(B1-B) + z(C1-C) = lambda * axis with x + y + z = 1.
///
/// Returns nullopt when a weight is non-positive. A singular system cannot
/// occur for a genuine tetrahedron; it is reported as UniquenessViolation.
template <Scalar T>
std::optional<StartPoint<T>> starting_point(const Tetrahedron<T>& tet, const ReflectionOrder& order) {
    const Vec3<T> axis = rotation_axis(cycle_rotation_matrix(tet, order));
    const UnfoldedChain<T> chain = unfold(tet, order);
    const std::array<Vec3<T>, 3> shifts{chain.A1() - tet.A(), chain.B1() - tet.B(), chain.C1() - tet.C()};

    std::array<std::array<T, 4>, 4> a{};
    std::array<T, 4> rhs{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a[r][c] = shifts[c][r];
        a[r][3] = -axis[r];
        rhs[r] = T(0);
    }
    a[3] = {T(1), T(1), T(1), T(0)};
    rhs[3] = T(1);

    auto sol = solve_linear<T, 4>(a, rhs);
    if (!sol)
        throw BilliardError(ErrorKind::UniquenessViolation,
                            "start-point system is rank deficient for order " + order.str());
    StartPoint<T> sp;
    sp.weights = {(*sol)[0], (*sol)[1], (*sol)[2]};
    sp.axis = axis;
    sp.axis_multiple = (*sol)[3];
    if (!barycentric_strictly_positive(sp.weights)) return std::nullopt;
    sp.point = point_from_barycentric(Triangle<T>{tet.A(), tet.B(), tet.C()}, sp.weights);
    sp.image = point_from_barycentric(chain.base_image(), sp.weights);
    return sp;
}

enum class Termination {
    Completed,       // requested number of bounces performed
    EdgeOrVertexHit, // trajectory met an edge or a vertex
    Escaped,         // no face ahead; start point outside or on the boundary moving out
};

template <Scalar T>
struct Trajectory {
    std::vector<Vec3<T>> points;      // start, then each bounce point
    std::vector<Face> faces;          // face of each bounce
    std::vector<Vec3<T>> directions;  // direction before the first flight, then after each bounce
    std::vector<T> flight_params;     // p_{i+1} = p_i + s_i * d_i
    Termination termination = Termination::Completed;
};

namespace detail {

template <Scalar T>
struct Hit {
    Face face;
    T param;
    Vec3<T> point;
};

/// Earliest face hit from `p` along `d` inside the tetrahedron. `strict`
/// reports whether the hit point is strictly interior to that face.
template <Scalar T>
std::optional<Hit<T>> next_hit(const Tetrahedron<T>& tet, const std::array<Plane<T>, 4>& planes, const Vec3<T>& p,
                               const Vec3<T>& d, bool& strict) {
    std::optional<Hit<T>> best;
    for (Face f : kAllFaces) {
        const Plane<T>& pl = planes[static_cast<int>(f)];
        T rate = dot(pl.normal, d);
        if (!(rate < T(0))) continue;  // not approaching
        T s = -pl.evaluate(p) / rate;
        if (!best || s < best->param) best = Hit<T>{f, s, {}};
    }
    if (!best) return std::nullopt;
    best->point = p + best->param * d;
    if constexpr (!ScalarTraits<T>::exact) {
        if (best->param <= ScalarTraits<T>::tolerance * tet.scale() / std::sqrt(norm2(d))) return std::nullopt;
    } else {
        if (best->param.sign() <= 0) return std::nullopt;
    }
    Triangle<T> tri = tet.face_triangle(best->face);
    // Project onto the plane to absorb float drift before the weight test.
    strict = barycentric_strictly_positive(barycentric_of(tri, best->point));
    return best;
}

}  // namespace detail

/// Straight-line flow with specular reflection. Stops early at edge or vertex
/// hits, which are reported through `termination` rather than thrown.
template <Scalar T>
Trajectory<T> simulate_billiard(const Tetrahedron<T>& tet, const Vec3<T>& start, const Vec3<T>& direction,
                                int n_bounces) {
    if (is_zero_vector(direction)) throw BilliardError(ErrorKind::InvalidArgument, "zero direction");
    std::array<Plane<T>, 4> planes;
    for (Face f : kAllFaces) planes[static_cast<int>(f)] = tet.face_plane(f);

    Trajectory<T> traj;
    traj.points.push_back(start);
    traj.directions.push_back(direction);
    Vec3<T> p = start;
    Vec3<T> d = direction;
    for (int i = 0; i < n_bounces; ++i) {
        bool strict = false;
        auto hit = detail::next_hit(tet, planes, p, d, strict);
        if (!hit) {
            traj.termination = Termination::Escaped;
            break;
        }
        traj.points.push_back(hit->point);
        traj.faces.push_back(hit->face);
        traj.flight_params.push_back(hit->param);
        if (!strict) {
            traj.termination = Termination::EdgeOrVertexHit;
            break;
        }
        p = hit->point;
        d = reflect_vector(planes[static_cast<int>(hit->face)], d);
        traj.directions.push_back(d);
    }
    return traj;
}

/// A certified closed trajectory. points[0] is the start F on ABC and
/// points[i] lies on order.faces()[i].
template <Scalar T>
struct FourCycle {
    ReflectionOrder order = ReflectionOrder::canonical(1);
    Vec3<T> start;
    Barycentric<T> start_weights;
    Vec3<T> direction;
    std::array<Vec3<T>, 4> points;
    std::array<T, 4> flight_params{};  // segment i has length flight_params[i] * |direction|
    T total_param{};

    [[nodiscard]] T length_squared() const { return total_param * total_param * norm2(direction); }
    [[nodiscard]] double length() const { return to_double(total_param) * norm(direction); }
};

/// Forward-simulates four bounces from `start` and accepts iff every bounce
/// lands strictly inside the scheduled face and the path closes on itself.
/// The direction is flipped if needed so that it leaves the base inward.
template <Scalar T>
std::optional<FourCycle<T>> certify_cycle(const Tetrahedron<T>& tet, const ReflectionOrder& order, const Vec3<T>& start,
                                          Vec3<T> direction) {
    if (is_zero_vector(direction)) return std::nullopt;
    const Plane<T> base = tet.face_plane(Face::ABC);
    const Triangle<T> base_tri = tet.face_triangle(Face::ABC);
    Barycentric<T> w;
    try {
        w = barycentric_of(base_tri, start);
    } catch (const BilliardError&) {
        return std::nullopt;
    }
    if (!barycentric_strictly_positive(w)) return std::nullopt;

    T inward = dot(direction, base.normal);
    int inward_sign;
    if constexpr (ScalarTraits<T>::exact) {
        inward_sign = inward.sign();
    } else {
        inward_sign = ScalarTraits<T>::sign(inward / std::sqrt(norm2(direction) * norm2(base.normal)));
    }
    if (inward_sign == 0) return std::nullopt;
    if (inward_sign < 0) direction = -direction;

    const Trajectory<T> traj = simulate_billiard(tet, start, direction, 4);
    if (traj.termination != Termination::Completed || traj.faces.size() != 4) return std::nullopt;
    const auto expected = order.bounce_faces();
    for (int i = 0; i < 4; ++i)
        if (traj.faces[i] != expected[i]) return std::nullopt;

    const Vec3<T>& end = traj.points[4];
    const Vec3<T>& end_dir = traj.directions[4];
    if constexpr (ScalarTraits<T>::exact) {
        if (!(end == start) || !(end_dir == direction)) return std::nullopt;
    } else {
        double tol = ScalarTraits<T>::tolerance;
        if (norm(end - start) > tol * tet.scale()) return std::nullopt;
        if (norm(end_dir - direction) > tol * norm(direction)) return std::nullopt;
    }

    FourCycle<T> cycle;
    cycle.order = order;
    cycle.start = start;
    cycle.start_weights = w;
    cycle.direction = direction;
    cycle.total_param = T(0);
    for (int i = 0; i < 4; ++i) {
        cycle.points[i] = traj.points[i];
        cycle.flight_params[i] = traj.flight_params[i];
        cycle.total_param += traj.flight_params[i];
    }
    return cycle;
}

/// Runs the full pipeline for one order: at most one cycle exists.
template <Scalar T>
std::optional<FourCycle<T>> find_cycle(const Tetrahedron<T>& tet, const ReflectionOrder& order) {
    auto sp = starting_point(tet, order);
    if (!sp) return std::nullopt;
    Vec3<T> travel = sp->image - sp->point;
    // The unfolded segment F -> F1 is the actual direction of travel; it must
    // leave the base inward.
    if (is_zero_vector(travel)) return std::nullopt;
    T inward = dot(travel, tet.face_plane(Face::ABC).normal);
    if (!(inward > T(0))) return std::nullopt;
    return certify_cycle(tet, order, sp->point, travel);
}

/// All certified 4-cycles, at most one per canonical order.
template <Scalar T>
std::vector<FourCycle<T>> find_cycles(const Tetrahedron<T>& tet) {
    std::vector<FourCycle<T>> out;
    for (const auto& order : ReflectionOrder::all())
        if (auto c = find_cycle(tet, order)) out.push_back(std::move(*c));
    return out;
}

}  // namespace billiards
