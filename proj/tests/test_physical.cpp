#include "support.hpp"

#include <billiards/physical.hpp>

#include <gtest/gtest.h>

using namespace billiards;
using namespace billiards::testing;

namespace {

const ReflectionOrder kFirst = ReflectionOrder::canonical(1);

PhysicalPyramid gravity_physical() { return PhysicalPyramid(gravity_pyramid().to_float()); }

/// Certified solution at ratio t from a seeded multistart.
std::optional<PhysicalSolution> solution_at(const PhysicalPyramid& pyr, const ReflectionOrder& order, double t) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 64; ++i)
        if (auto s = solve_at_t(pyr, order, t, random_guess(pyr, t, rng))) return s;
    return std::nullopt;
}

double dist(const Vec3<double>& p, const Vec3<double>& q) { return norm(p - q); }

}  // namespace

TEST(Flight, ZeroStepIsIdentity) {
    PhysState s{{1, 2, 3}, {4, 5, 6}, 7};
    PhysState r = flight(s, 0.0, 9.81);
    EXPECT_EQ(r.position, s.position);
    EXPECT_EQ(r.velocity, s.velocity);
    EXPECT_EQ(r.time, s.time);
}

TEST(Flight, FirstArcFromTheBase) {
    const double a = 1.5, b = 0.75, k = 0.3, l = -0.2, m = 2.0, g = 1.7, t1 = 0.8;
    PhysState r = flight({{a, b, 0}, {k, l, m}, 0}, t1, g);
    EXPECT_DOUBLE_EQ(r.position.x, a + k * t1);
    EXPECT_DOUBLE_EQ(r.position.y, b + l * t1);
    EXPECT_DOUBLE_EQ(r.position.z, m * t1 - g * t1 * t1 / 2);
    EXPECT_EQ(r.velocity, (Vec3<double>{k, l, m - g * t1}));
    EXPECT_DOUBLE_EQ(r.time, t1);
}

TEST(Bounce, ShiftAlongTheABDNormal) {
    const Vec3<double> n{0, 3, -1};
    const Vec3<double> v{1, 2, 3};
    const double s = dot(v, n);
    Vec3<double> out = bounce(v, n);
    EXPECT_NEAR(out.x, v.x, 1e-15);
    EXPECT_NEAR(out.y, v.y - 6 * s / 10, 1e-15);
    EXPECT_NEAR(out.z, v.z + 2 * s / 10, 1e-15);
    EXPECT_NEAR(norm(out), norm(v), 1e-15);
}

TEST(Bounce, TangentNormalAndZeroCases) {
    const Vec3<double> n{0, 3, -1};
    EXPECT_EQ(bounce(Vec3<double>{5, 1, 3}, n), (Vec3<double>{5, 1, 3}));
    EXPECT_EQ(bounce(n, n), -n);
    EXPECT_THROW(bounce(Vec3<double>{1, 0, 0}, Vec3<double>{0, 0, 0}), BilliardError);
}

TEST(Residual, FirstComponentIsTheABDPlaneAtTheFirstBounce) {
    auto pyr = gravity_physical();
    UnknownVector u{1.5, 0.5, 0.2, 0.4, 2.0, 1.0, 0.7, 1.0, 0.3, 0.9};
    auto r = residual(u, pyr, kFirst);
    PhysState p2 = flight(u.initial_state(), u.t1, u.g);
    // Unit inward normal of ABD is (0, 3, -1) / sqrt(10).
    EXPECT_NEAR(r[0] * std::sqrt(10.0), 3 * p2.position.y - p2.position.z, 1e-12);

    UnknownVector on_trace = u;
    on_trace.b = 0;
    on_trace.t1 = 0;
    EXPECT_NEAR(residual(on_trace, pyr, kFirst)[0], 0.0, 1e-15);
}

TEST(Residual, ClosureComponentsMatchAForwardComputation) {
    auto pyr = gravity_physical();
    UnknownVector u{1.5, 0.5, 0.2, 0.4, 2.0, 1.0, 0.7, 1.0, 0.3, 0.9};
    auto r = residual(u, pyr, kFirst);
    PhysState s = u.initial_state();
    const std::array<double, 4> dts{u.t1, u.t2, u.t3, u.t4};
    const auto faces = kFirst.bounce_faces();
    for (int i = 0; i < 4; ++i) {
        s = flight(s, dts[i], u.g);
        if (i < 3) s.velocity = bounce(s.velocity, pyr.plane(faces[i]).normal);
    }
    EXPECT_NEAR(r[3], s.position.x - u.a, 1e-12);
    EXPECT_NEAR(r[4], s.position.y - u.b, 1e-12);
    EXPECT_NEAR(r[5], s.position.z, 1e-12);
    EXPECT_NEAR(r[6], s.velocity.x - u.k, 1e-12);
    EXPECT_NEAR(r[7], s.velocity.y - u.l, 1e-12);
    EXPECT_NEAR(r[8], s.velocity.z + u.m, 1e-12);
}

TEST(SolveAtT, CertifiedInsideTheAdmissibleInterval) {
    auto pyr = gravity_physical();
    auto sol = solution_at(pyr, kFirst, 0.2);
    ASSERT_TRUE(sol);
    EXPECT_TRUE(sol->certified);
    EXPECT_LT(sol->residual, 1e-10);
    EXPECT_DOUBLE_EQ(sol->u.t2, 1.0);
    EXPECT_DOUBLE_EQ(sol->u.t3, 0.2);
    EXPECT_TRUE(sol->u.physically_positive());
    EXPECT_TRUE(forward_check(*sol, pyr, kFirst));
    Triangle<double> base = pyr.tet().face_triangle(Face::ABC);
    EXPECT_TRUE(point_in_triangle_strict(base, Vec3<double>{sol->u.a, sol->u.b, 0}));
    // The start curve runs from about (2, 1) to about (2.6, 0.8).
    EXPECT_GT(sol->u.a, 1.9);
    EXPECT_LT(sol->u.a, 2.7);
    EXPECT_GT(sol->u.b, 0.7);
    EXPECT_LT(sol->u.b, 1.1);
}

TEST(SolveAtT, NoSolutionOutsideTheInterval) {
    auto pyr = gravity_physical();
    auto inside = solution_at(pyr, kFirst, 0.2);
    ASSERT_TRUE(inside);
    UnknownVector warm = inside->u;
    warm.t3 = 0.6;
    EXPECT_FALSE(solve_at_t(pyr, kFirst, 0.6, warm));
    std::mt19937_64 rng(99);
    for (int i = 0; i < 64; ++i) EXPECT_FALSE(solve_at_t(pyr, kFirst, 0.6, random_guess(pyr, 0.6, rng)));
    EXPECT_FALSE(solve_at_t(pyr, kFirst, -1.0, warm));
}

TEST(SolveAtT, SolutionIsAFixedPoint) {
    auto pyr = gravity_physical();
    auto sol = solution_at(pyr, kFirst, 0.2);
    ASSERT_TRUE(sol);
    auto again = solve_at_t(pyr, kFirst, 0.2, sol->u);
    ASSERT_TRUE(again);
    auto x = sol->u.to_array(), y = again->u.to_array();
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(x[i], y[i], 1e-12) << i;
}

TEST(ForwardCheck, NegativeControls) {
    auto pyr = gravity_physical();
    auto sol = solution_at(pyr, kFirst, 0.2);
    ASSERT_TRUE(sol);
    PhysicalSolution moved = *sol;
    moved.u.a += 5.0;  // start outside the base
    EXPECT_FALSE(forward_check(moved, pyr, kFirst));
    PhysicalSolution heavier = *sol;
    heavier.u.g += 1e-3;
    EXPECT_FALSE(forward_check(heavier, pyr, kFirst));
    EXPECT_FALSE(evaluate_solution(heavier.u, pyr, kFirst).certified);
    EXPECT_FALSE(forward_check(*sol, pyr, ReflectionOrder::canonical(2)));
}

TEST(PhysicalProperties, EnergyScalingAndConsistency) {
    auto pyr = gravity_physical();
    for (double t : {0.05, 0.2, 0.4}) {
        auto sol = solution_at(pyr, kFirst, t);
        ASSERT_TRUE(sol) << t;
        EXPECT_LT(sol->energy_drift, 1e-9);

        for (double lambda : {0.5, 2.0, 3.7}) {
            UnknownVector scaled = sol->u.rescaled(lambda);
            auto ev = evaluate_solution(scaled, pyr, kFirst);
            EXPECT_TRUE(ev.certified) << lambda;
            EXPECT_NEAR(scaled.a, sol->u.a, 1e-12);
            for (int i = 0; i < 3; ++i) EXPECT_LT(dist(ev.bounce_points[i], sol->bounce_points[i]), 1e-9);
            EXPECT_NEAR(scaled.ratio(), sol->u.ratio(), 1e-12);
        }

        // Residual path and event-driven simulation agree on the bounce points.
        auto traj = physical_simulate(pyr, sol->u.initial_state(), sol->u.g, 4, Face::ABC);
        ASSERT_EQ(traj.pre_bounce.size(), 4u);
        for (int i = 0; i < 3; ++i) EXPECT_LT(dist(traj.pre_bounce[i].position, sol->bounce_points[i]), 1e-9);
    }
}

TEST(PhysicalProperties, TimeReversalCertifiesTheReversedOrder) {
    auto pyr = gravity_physical();
    auto sol = solution_at(pyr, kFirst, 0.3);
    ASSERT_TRUE(sol);
    const UnknownVector& u = sol->u;
    UnknownVector rev{u.a, u.b, -u.k, -u.l, u.m, u.g, u.t4, u.t3, u.t2, u.t1};
    auto ev = evaluate_solution(rev, pyr, kFirst.reversed());
    EXPECT_TRUE(ev.certified);
    EXPECT_LT(dist(ev.bounce_points[0], sol->bounce_points[2]), 1e-9);
    EXPECT_LT(dist(ev.bounce_points[2], sol->bounce_points[0]), 1e-9);
}

TEST(PhysicalSimulate, EventTimesSolveThePlaneEquation) {
    auto pyr = gravity_physical();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1, 1);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        PhysState s{{2.2 + 0.3 * unit(rng), 1.0 + 0.3 * unit(rng), 0.5 + 0.3 * unit(rng)},
                    {unit(rng), unit(rng), unit(rng)},
                    0};
        auto hit = next_arc_hit(pyr, s, 1.3, std::nullopt);
        if (!hit) continue;
        ++checked;
        PhysState at = flight(s, hit->time, 1.3);
        EXPECT_LT(std::fabs(pyr.plane(hit->face).evaluate(at.position)), 1e-11 * pyr.scale());
        for (Face f : kAllFaces) EXPECT_GT(pyr.plane(f).evaluate(at.position), -1e-11 * pyr.scale());
    }
    EXPECT_GT(checked, 150);
}

TEST(PhysicalSimulate, ZeroGravityMatchesTheStraightFlow) {
    auto tet = reference_pyramid().to_float();
    PhysicalPyramid pyr(tet);
    Vec3<double> start{2.1, 1.3, 0.4}, dir{0.31, -0.17, 0.52};
    auto phys = physical_simulate(pyr, {start, dir, 0}, 0.0, 10);
    auto math = simulate_billiard(tet, start, dir, 10);
    ASSERT_EQ(phys.faces.size(), math.faces.size());
    for (std::size_t i = 0; i < phys.faces.size(); ++i) {
        EXPECT_EQ(phys.faces[i], math.faces[i]);
        EXPECT_LT(dist(phys.pre_bounce[i].position, math.points[i + 1]), 1e-9);
    }
}

TEST(PhysicalSimulate, VerticalLaunchReturnsAfterTwoMOverG) {
    auto pyr = gravity_physical();
    const double m = 1.0, g = 1.0;
    auto traj = physical_simulate(pyr, {{2, 1, 0}, {0, 0, m}, 0}, g, 1, Face::ABC);
    ASSERT_EQ(traj.faces.size(), 1u);
    EXPECT_EQ(traj.faces[0], Face::ABC);
    EXPECT_NEAR(traj.pre_bounce[0].time, 2 * m / g, 1e-12);
    EXPECT_LT(dist(traj.pre_bounce[0].position, {2, 1, 0}), 1e-12);
    EXPECT_LT(dist(traj.states[1].velocity, {0, 0, m}), 1e-12);
}

TEST(PhysicalSimulate, CertifiedOrbitIsPeriodFour) {
    auto pyr = gravity_physical();
    auto sol = solution_at(pyr, kFirst, 0.25);
    ASSERT_TRUE(sol);
    auto traj = physical_simulate(pyr, sol->u.initial_state(), sol->u.g, 8, Face::ABC);
    ASSERT_EQ(traj.faces.size(), 8u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(traj.faces[i], traj.faces[i + 4]);
        EXPECT_LT(dist(traj.pre_bounce[i].position, traj.pre_bounce[i + 4].position), 1e-8);
    }
}

TEST(ScanFamily, RejectsBadInput) {
    auto pyr = gravity_physical();
    EXPECT_THROW(scan_family(pyr, kFirst, {0.3, 0.1}), BilliardError);
    EXPECT_THROW(scan_family(pyr, kFirst, {0.0, 0.1}), BilliardError);
    EXPECT_THROW(scan_family(pyr, kFirst, {}), BilliardError);
    FamilyScanOptions opt;
    opt.multistart = 0;
    EXPECT_THROW(scan_family(pyr, kFirst, {0.1, 0.2}, opt), BilliardError);
    EXPECT_THROW(log_grid(0, 1, 5), BilliardError);
    auto g = log_grid(1e-3, 1e2, 6);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-3);
    EXPECT_NEAR(g.back(), 1e2, 1e-12);
}

TEST(ScanFamily, SmallScanIsDeterministicAndInsideTheBase) {
    auto pyr = gravity_physical();
    FamilyScanOptions opt;
    opt.multistart = 4;
    opt.seed = 7;
    std::vector<double> grid{0.1, 0.2, 0.3, 0.4};
    opt.threads = 1;
    auto a = scan_family(pyr, kFirst, grid, opt);
    opt.threads = 4;
    auto b = scan_family(pyr, kFirst, grid, opt);
    ASSERT_EQ(a.branches.size(), b.branches.size());
    ASSERT_FALSE(a.branches.empty());
    Triangle<double> base = pyr.tet().face_triangle(Face::ABC);
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        ASSERT_EQ(a.branches[i].samples.size(), b.branches[i].samples.size());
        for (std::size_t j = 0; j < a.branches[i].samples.size(); ++j) {
            const auto& s = a.branches[i].samples[j].solution;
            EXPECT_EQ(s.u.to_array(), b.branches[i].samples[j].solution.u.to_array());
            EXPECT_TRUE(point_in_triangle_strict(base, Vec3<double>{s.u.a, s.u.b, 0}));
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_TRUE(a.at_grid(i)) << grid[i];
}
