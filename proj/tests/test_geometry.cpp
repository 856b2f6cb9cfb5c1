#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace billiards;
using namespace billiards::testing;

namespace {

template <Scalar T>
bool parallel(const Vec3<T>& a, const Vec3<T>& b) {
    return is_zero_vector(cross(a, b));
}

Mat3<Q> over23(std::array<std::array<int, 3>, 3> rows) {
    Mat3<Q> m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.m[i][j] = Q(rows[i][j], 23);
    return m;
}

}  // namespace

TEST(Plane, ThroughThreePointsOfTheFirstExample) {
    auto tet = reference_pyramid();
    auto abd = plane_from_points(tet.A(), tet.B(), tet.D());
    EXPECT_TRUE(parallel(abd.normal, Vec3<Q>{0, 1, -1}));
    auto base = plane_from_points(tet.A(), tet.B(), tet.C());
    EXPECT_TRUE(parallel(base.normal, Vec3<Q>{0, 0, 1}));
    EXPECT_EQ(base.evaluate({5, -7, 0}), Q(0));
    EXPECT_THROW(plane_from_points(Vec3<Q>{0, 0, 0}, Vec3<Q>{1, 1, 1}, Vec3<Q>{2, 2, 2}), BilliardError);
}

TEST(Plane, FaceNormalsPointInward) {
    auto tet = gravity_pyramid();
    // ABD: 3y - z = 0, ACD: 3x - 3y - z = 0, BCD: -9x - 3y - 5z + 36 = 0.
    auto abd = tet.face_plane(Face::ABD);
    auto acd = tet.face_plane(Face::ACD);
    auto bcd = tet.face_plane(Face::BCD);
    EXPECT_TRUE(parallel(abd.normal, Vec3<Q>{0, 3, -1}));
    EXPECT_TRUE(parallel(acd.normal, Vec3<Q>{3, -3, -1}));
    EXPECT_TRUE(parallel(bcd.normal, Vec3<Q>{-9, -3, -5}));
    EXPECT_GT(dot(abd.normal, Vec3<Q>{0, 3, -1}), Q(0));
    EXPECT_GT(dot(acd.normal, Vec3<Q>{3, -3, -1}), Q(0));
    EXPECT_GT(dot(bcd.normal, Vec3<Q>{-9, -3, -5}), Q(0));
    EXPECT_EQ(bcd.evaluate(tet.B()), Q(0));
    EXPECT_EQ(bcd.evaluate(tet.C()), Q(0));
    EXPECT_EQ(bcd.evaluate(tet.D()), Q(0));
    Vec3<Q> centroid = (tet.A() + tet.B() + tet.C() + tet.D()) / Q(4);
    for (Face f : kAllFaces) EXPECT_GT(tet.face_plane(f).evaluate(centroid), Q(0)) << face_name(f);
}

TEST(Reflection, MatricesOfTheFirstExample) {
    auto tet = reference_pyramid();
    Mat3<Q> base = Mat3<Q>::identity();
    base.m[2][2] = Q(-1);
    EXPECT_EQ(reflection_matrix(tet.face_plane(Face::ABC)), base);

    Mat3<Q> swap = Mat3<Q>::from_rows({1, 0, 0}, {0, 0, 1}, {0, 1, 0});
    EXPECT_EQ(reflection_matrix(tet.face_plane(Face::ABD)), swap);

    EXPECT_EQ(reflection_matrix(tet.face_plane(Face::ACD)),
              over23({{{-13, 18, 6}, {18, 14, -3}, {6, -3, 22}}}));
    EXPECT_EQ(reflection_matrix(tet.face_plane(Face::BCD)),
              over23({{{-13, -18, -6}, {-18, 14, -3}, {-6, -3, 22}}}));
}

TEST(Reflection, IsAnOrthogonalInvolutionOfDeterminantMinusOne) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Vec3<Q> n{random_q(rng, -5, 5, 3), random_q(rng, -5, 5, 3), random_q(rng, -5, 5, 3)};
        if (is_zero_vector(n)) continue;
        Plane<Q> p{n, random_q(rng, -5, 5, 2)};
        Mat3<Q> r = reflection_matrix(p);
        EXPECT_EQ(r * r, Mat3<Q>::identity());
        EXPECT_EQ(r.transpose() * r, Mat3<Q>::identity());
        EXPECT_EQ(r.determinant(), Q(-1));
        EXPECT_EQ(r * n, -n);
        Vec3<Q> x{random_q(rng, -5, 5, 7), random_q(rng, -5, 5, 7), random_q(rng, -5, 5, 7)};
        EXPECT_EQ(reflect_vector(p, x), r * x);
        Vec3<Q> img = reflect_point(p, x);
        EXPECT_EQ(reflect_point(p, img), x);
        EXPECT_EQ(p.evaluate(img), -p.evaluate(x));
    }
}

TEST(Reflection, ZeroNormalThrows) {
    Plane<Q> p{{0, 0, 0}, Q(1)};
    try {
        reflection_matrix(p);
        FAIL();
    } catch (const BilliardError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroNormal);
    }
}

TEST(Barycentric, VerticesCentroidAndStartPointOfTheFirstExample) {
    auto tet = reference_pyramid();
    auto tri = tet.face_triangle(Face::ABC);
    EXPECT_EQ(barycentric_of(tri, tet.A()), (Barycentric<Q>{1, 0, 0}));
    EXPECT_EQ(barycentric_of(tri, tet.C()), (Barycentric<Q>{0, 0, 1}));
    Vec3<Q> centroid = (tri.a + tri.b + tri.c) / Q(3);
    EXPECT_EQ(barycentric_of(tri, centroid), (Barycentric<Q>{Q(1, 3), Q(1, 3), Q(1, 3)}));
    Barycentric<Q> w{Q(115, 1778), Q(583, 1778), Q(540, 889)};
    EXPECT_EQ(point_from_barycentric(tri, w), (Vec3<Q>{Q(2246, 889), Q(2160, 889), 0}));
    EXPECT_EQ(barycentric_of(tri, point_from_barycentric(tri, w)), w);
}

TEST(Barycentric, RoundTripOnRandomTriangles) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Triangle<Q> tri{{random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2)},
                        {random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2)},
                        {random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2), random_q(rng, -9, 9, 2)}};
        if (is_zero_vector(tri.normal())) continue;
        Q u = random_q(rng, -2, 2, 5), v = random_q(rng, -2, 2, 5);
        Barycentric<Q> w{u, v, Q(1) - u - v};
        EXPECT_EQ(barycentric_of(tri, point_from_barycentric(tri, w)), w);
    }
}

TEST(Barycentric, OffPlanePointThrows) {
    Triangle<Q> tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    try {
        barycentric_of(tri, Vec3<Q>{0, 0, Q(1, 1000)});
        FAIL();
    } catch (const BilliardError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OffPlane);
    }
    Triangle<double> ftri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    EXPECT_NO_THROW(barycentric_of(ftri, Vec3<double>{0.2, 0.2, 1e-14}));
    EXPECT_THROW(barycentric_of(ftri, Vec3<double>{0.2, 0.2, 1e-3}), BilliardError);
}

TEST(Barycentric, StrictInteriorExcludesEdges) {
    Triangle<Q> tri{{0, 0, 0}, {4, 0, 0}, {2, 4, 0}};
    EXPECT_TRUE(point_in_triangle_strict(tri, Vec3<Q>{2, 1, 0}));
    EXPECT_FALSE(point_in_triangle_strict(tri, Vec3<Q>{2, 0, 0}));
    EXPECT_FALSE(point_in_triangle_strict(tri, tri.b));
    EXPECT_FALSE(point_in_triangle_strict(tri, Vec3<Q>{5, 1, 0}));
}

TEST(Tetrahedron, DegenerateInputThrows) {
    try {
        Tetrahedron<Q> flat({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0});
        FAIL();
    } catch (const BilliardError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
    }
    EXPECT_THROW(Tetrahedron<double>({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 1e-15}), BilliardError);
    EXPECT_THROW(Tetrahedron<Q>::canonical({0, 0}, {1, 0}, {0, 1}, {0, 0}, Q(0)), BilliardError);
}

TEST(Tetrahedron, FaceAndEdgeNames) {
    EXPECT_EQ(face_from_name("DBA"), Face::ABD);
    EXPECT_EQ(face_name(Face::BCD), "BCD");
    EXPECT_THROW(face_from_name("ABX"), BilliardError);
    for (Face f : kAllFaces) {
        auto v = face_vertices(f);
        for (int i : v) EXPECT_NE(i, opposite_vertex(f));
    }
    for (Edge e : kAllEdges) {
        auto [f1, f2] = edge_faces(e);
        auto [i, j] = edge_vertices(e);
        for (Face f : {f1, f2}) {
            auto v = face_vertices(f);
            EXPECT_NE(std::find(v.begin(), v.end(), i), v.end()) << edge_name(e);
            EXPECT_NE(std::find(v.begin(), v.end(), j), v.end()) << edge_name(e);
        }
        EXPECT_NE(f1, f2);
    }
}

TEST(Dihedral, RegularTetrahedron) {
    const double expected = std::acos(1.0 / 3.0);
    for (auto d : dihedral_angles(regular_float())) EXPECT_NEAR(d.radians, expected, 1e-12);
    for (Edge e : kAllEdges) EXPECT_EQ(dihedral_cosine_sign(regular_rational(), e), 1);
    EXPECT_EQ(count_obtuse_dihedrals(regular_rational()), 0);
}

TEST(Dihedral, RightAngleAlongADForTheOrthogonalFaceFamily) {
    // A at the origin, B in the xz plane, C in the yz plane, D on the z axis.
    std::mt19937_64 rng(9);
    int built = 0;
    for (int i = 0; i < 100; ++i) {
        Q a = random_q(rng, 1, 8, 2), b = random_q(rng, -4, 4, 2), c = random_q(rng, 1, 8, 2);
        Q d = random_q(rng, -4, 4, 2), e = random_q(rng, 1, 10, 2);
        try {
            Tetrahedron<Q> tet({0, 0, 0}, {a, 0, b}, {0, c, d}, {0, 0, e});
            EXPECT_EQ(dihedral_cosine_sign(tet, Edge::AD), 0);
            EXPECT_NEAR(dihedral_angle(tet, Edge::AD), std::numbers::pi / 2, 1e-12);
            ++built;
        } catch (const BilliardError&) {
        }
    }
    EXPECT_GT(built, 50);
}

TEST(Dihedral, LowApexPyramidHasObtuseAnglesAtADAndBD) {
    // Angles from the face-perpendicular construction: AD 104.96, BD 97.75,
    // the other four acute. Only two of the six are obtuse.
    auto tet = low_apex();
    EXPECT_EQ(count_obtuse_dihedrals(tet), 2);
    EXPECT_EQ(count_obtuse_dihedrals(tet.to_float()), 2);
    EXPECT_EQ(dihedral_cosine_sign(tet, Edge::AD), -1);
    EXPECT_EQ(dihedral_cosine_sign(tet, Edge::BD), -1);
    EXPECT_NEAR(dihedral_angle(tet, Edge::AD) * 180 / std::numbers::pi, 104.96321743330714, 1e-9);
    EXPECT_NEAR(dihedral_angle(tet, Edge::BD) * 180 / std::numbers::pi, 97.7493663782984, 1e-9);
    EXPECT_EQ(count_obtuse_dihedrals(gravity_pyramid()), 0);
}

TEST(CommonPerpendicular, CoordinateAxes) {
    auto x_axis = Line3<Q>{{0, 0, 0}, {1, 0, 0}};
    auto lifted_y = Line3<Q>{{3, 5, 2}, {0, 1, 0}};
    auto feet = common_perpendicular(x_axis, lifted_y);
    EXPECT_EQ(feet.on_first, (Vec3<Q>{3, 0, 0}));
    EXPECT_EQ(feet.on_second, (Vec3<Q>{3, 0, 2}));
    EXPECT_EQ(feet.param_first, Q(3));
    EXPECT_EQ(feet.param_second, Q(-5));
}

TEST(CommonPerpendicular, FeetJoinPerpendicularToBothLines) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        auto r = [&] { return random_q(rng, -6, 6, 3); };
        Line3<Q> l1{{r(), r(), r()}, {r(), r(), r()}};
        Line3<Q> l2{{r(), r(), r()}, {r(), r(), r()}};
        try {
            auto f = common_perpendicular(l1, l2);
            Vec3<Q> seg = f.on_second - f.on_first;
            EXPECT_EQ(dot(seg, l1.direction), Q(0));
            EXPECT_EQ(dot(seg, l2.direction), Q(0));
        } catch (const BilliardError& e) {
            EXPECT_TRUE(e.kind() == ErrorKind::ParallelLines || e.kind() == ErrorKind::IntersectingLines ||
                        e.kind() == ErrorKind::DegenerateInput);
        }
    }
}

TEST(CommonPerpendicular, ParallelAndIntersectingLinesAreRejected) {
    auto kind_of = [](auto&& fn) {
        try {
            fn();
        } catch (const BilliardError& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    Line3<Q> a{{0, 0, 0}, {1, 2, 3}};
    Line3<Q> b{{1, 0, 0}, {2, 4, 6}};
    Line3<Q> c{{1, 2, 3}, {0, 1, 0}};
    EXPECT_EQ(kind_of([&] { common_perpendicular(a, b); }), ErrorKind::ParallelLines);
    EXPECT_EQ(kind_of([&] { common_perpendicular(a, c); }), ErrorKind::IntersectingLines);
    Line3<double> fa{{0, 0, 0}, {1, 2, 3}};
    Line3<double> fb{{1, 0, 0}, {2, 4, 6}};
    EXPECT_EQ(kind_of([&] { common_perpendicular(fa, fb); }), ErrorKind::ParallelLines);
}

TEST(Backends, FloatMatchesExactOnRandomPyramids) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        auto tet = random_rational_pyramid(rng);
        auto ft = tet.to_float();
        for (Face f : kAllFaces) {
            Mat3<Q> r = reflection_matrix(tet.face_plane(f));
            Mat3<double> fr = reflection_matrix(ft.face_plane(f));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) EXPECT_NEAR(r(a, b).to_double(), fr(a, b), 1e-12);
        }
        for (Edge e : kAllEdges) {
            double angle = dihedral_angle(tet, e);
            if (std::fabs(angle - std::numbers::pi / 2) > 1e-6) {
                EXPECT_EQ(dihedral_cosine_sign(tet, e), dihedral_cosine_sign(ft, e));
            }
        }
    }
}
