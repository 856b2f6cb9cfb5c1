#pragma once

// Gravity billiard in a tetrahedron: a point mass under uniform gravity -g e_z
// with elastic bounces. Between bounces the path is a parabola.
//
// A period-4 orbit starting on the base at (a, b, 0) with velocity (k, l, m)
// is described by ten unknowns {a, b, k, l, m, g, t1, t2, t3, t4}, where t_i
// are the flight times between consecutive bounces. Closure gives nine
// equations: three face incidences plus return to the start position (3)
// and to the mirrored velocity (k, l, -m) (3). Solutions come in families
// invariant under the time rescaling t_i -> s t_i, v -> v / s, g -> g / s^2,
// so only the ratio t = t3 / t2 matters geometrically; the solver fixes
// t2 = 1 and t3 = t.

#include <billiards/dual.hpp>
#include <billiards/geometry.hpp>
#include <billiards/math_cycle.hpp>
#include <billiards/parallel.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace billiards {

struct PhysState {
    Vec3<double> position;
    Vec3<double> velocity;
    double time = 0.0;
};

/// Ballistic flight for `dt` under gravity `g` (acting along -z).
inline PhysState flight(const PhysState& s, double dt, double g) {
    PhysState r;
    r.position = s.position + dt * s.velocity + Vec3<double>(0.0, 0.0, -0.5 * g * dt * dt);
    r.velocity = s.velocity + Vec3<double>(0.0, 0.0, -g * dt);
    r.time = s.time + dt;
    return r;
}

/// Elastic reflection of `v` off a plane with normal `n` (any length).
inline Vec3<double> bounce(const Vec3<double>& v, const Vec3<double>& n) {
    double nn = norm2(n);
    if (nn == 0.0) throw BilliardError(ErrorKind::ZeroNormal, "bounce off a zero normal");
    return v - (2.0 * dot(v, n) / nn) * n;
}

inline double energy(const PhysState& s, double g) { return 0.5 * norm2(s.velocity) + g * s.position.z; }

struct UnknownVector {
    double a = 0, b = 0;
    double k = 0, l = 0, m = 0;
    double g = 0;
    double t1 = 0, t2 = 1, t3 = 0, t4 = 0;

    [[nodiscard]] std::array<double, 10> to_array() const { return {a, b, k, l, m, g, t1, t2, t3, t4}; }
    static UnknownVector from_array(const std::array<double, 10>& x) {
        return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9]};
    }

    [[nodiscard]] double ratio() const { return t3 / t2; }

    /// Same orbit traversed `lambda` times slower under weaker gravity.
    [[nodiscard]] UnknownVector rescaled(double lambda) const {
        UnknownVector r = *this;
        r.k /= lambda;
        r.l /= lambda;
        r.m /= lambda;
        r.g /= lambda * lambda;
        r.t1 *= lambda;
        r.t2 *= lambda;
        r.t3 *= lambda;
        r.t4 *= lambda;
        return r;
    }

    [[nodiscard]] bool physically_positive() const { return m > 0 && g > 0 && t1 > 0 && t2 > 0 && t3 > 0 && t4 > 0; }

    [[nodiscard]] PhysState initial_state() const { return {{a, b, 0.0}, {k, l, m}, 0.0}; }
};

/// Unit inward face planes of a float tetrahedron, cached for the solvers.
class PhysicalPyramid {
public:
    explicit PhysicalPyramid(Tetrahedron<double> tet) : tet_(std::move(tet)) {
        for (Face f : kAllFaces) {
            Plane<double> p = tet_.face_plane(f);
            double len = std::sqrt(norm2(p.normal));
            planes_[static_cast<int>(f)] = {p.normal / len, p.offset / len};
        }
        scale_ = tet_.scale();
    }

    [[nodiscard]] const Tetrahedron<double>& tet() const { return tet_; }
    [[nodiscard]] const Plane<double>& plane(Face f) const { return planes_[static_cast<int>(f)]; }
    [[nodiscard]] double scale() const { return scale_; }

private:
    Tetrahedron<double> tet_;
    std::array<Plane<double>, 4> planes_;
    double scale_ = 1.0;
};

/// Closure residual for any arithmetic type S (double or dual numbers).
/// Components 0..2: signed distance of the three lateral bounce points from
/// their faces; 3..5: final position minus (a, b, 0); 6..8: final velocity
/// minus (k, l, -m).
template <typename S>
std::array<S, 9> closure_residual(const std::array<S, 10>& u, const PhysicalPyramid& pyr, const ReflectionOrder& order,
                                  std::array<Vec3<S>, 3>* bounce_points = nullptr) {
    const S& a = u[0];
    const S& b = u[1];
    const S& g = u[5];
    Vec3<S> p(a, b, S(0.0));
    Vec3<S> v(u[2], u[3], u[4]);
    std::array<S, 9> r;
    const auto faces = order.bounce_faces();
    for (int i = 0; i < 4; ++i) {
        const S& dt = u[6 + i];
        p = p + dt * v;
        p.z -= S(0.5) * g * dt * dt;
        v.z -= g * dt;
        if (i == 3) break;
        const Plane<double>& pl = pyr.plane(faces[i]);
        Vec3<S> n(S(pl.normal.x), S(pl.normal.y), S(pl.normal.z));
        r[i] = dot(n, p) + S(pl.offset);
        if (bounce_points) (*bounce_points)[i] = p;
        S s = dot(v, n);
        v = v - S(2.0) * s * n;
    }
    r[3] = p.x - a;
    r[4] = p.y - b;
    r[5] = p.z;
    r[6] = v.x - u[2];
    r[7] = v.y - u[3];
    r[8] = v.z + u[4];
    return r;
}

inline std::array<double, 9> residual(const UnknownVector& u, const PhysicalPyramid& pyr, const ReflectionOrder& order) {
    return closure_residual<double>(u.to_array(), pyr, order);
}

inline std::array<Vec3<double>, 3> lateral_bounce_points(const UnknownVector& u, const PhysicalPyramid& pyr,
                                                         const ReflectionOrder& order) {
    std::array<Vec3<double>, 3> pts;
    closure_residual<double>(u.to_array(), pyr, order, &pts);
    return pts;
}

inline double residual_norm(const std::array<double, 9>& r) {
    double s = 0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
}

struct PhysicalSolution {
    UnknownVector u;
    std::array<Vec3<double>, 3> bounce_points;  // on the three lateral faces, in order
    double residual = 0.0;                      // ||closure residual|| / pyramid scale
    double energy_drift = 0.0;                  // max relative energy deviation over the orbit
    bool certified = false;

    [[nodiscard]] Vec2<double> start() const { return {u.a, u.b}; }
};

/// Earliest positive hit of a parabolic arc with any face plane.
struct ArcHit {
    Face face;
    double time;
};

namespace detail {

/// Smallest root > `min_time` of alpha s^2 + beta s + gamma = 0.
inline std::optional<double> smallest_positive_root(double alpha, double beta, double gamma, double min_time) {
    std::optional<double> best;
    auto consider = [&](double s) {
        if (s > min_time && (!best || s < *best)) best = s;
    };
    if (alpha == 0.0) {
        if (beta != 0.0) consider(-gamma / beta);
        return best;
    }
    double disc = beta * beta - 4.0 * alpha * gamma;
    if (disc < 0.0) return best;
    double sq = std::sqrt(disc);
    double q = -0.5 * (beta + (beta >= 0 ? sq : -sq));
    if (q != 0.0) {
        consider(q / alpha);
        consider(gamma / q);
    } else {
        consider(0.0);
    }
    return best;
}

}  // namespace detail

/// Finds the first face hit by the arc leaving `s`. `current` is the face the
/// point is resting on (its trivial root at time 0 is removed exactly).
inline std::optional<ArcHit> next_arc_hit(const PhysicalPyramid& pyr, const PhysState& s, double g,
                                          std::optional<Face> current) {
    std::optional<ArcHit> best;
    const double speed = std::sqrt(norm2(s.velocity)) + std::sqrt(g * pyr.scale());
    const double min_time = 1e-12 * pyr.scale() / std::max(speed, 1e-300);
    for (Face f : kAllFaces) {
        const Plane<double>& pl = pyr.plane(f);
        double alpha = -0.5 * g * pl.normal.z;
        double beta = dot(pl.normal, s.velocity);
        double gamma = pl.evaluate(s.position);
        std::optional<double> root;
        if (current && *current == f) {
            // Drop the root at 0: remaining root of alpha s + beta = 0.
            if (alpha != 0.0) {
                double other = -beta / alpha;
                if (other > min_time) root = other;
            }
        } else {
            root = detail::smallest_positive_root(alpha, beta, gamma, min_time);
        }
        if (root && (!best || *root < best->time)) best = ArcHit{f, *root};
    }
    return best;
}

struct PhysTrajectory {
    std::vector<PhysState> states;  // initial state, then the post-bounce state at each bounce
    std::vector<Face> faces;
    std::vector<PhysState> pre_bounce;  // state just before each bounce
    Termination termination = Termination::Completed;
};

/// Event-driven simulation: repeatedly fly to the earliest face hit and
/// bounce. Terminates early at edge or vertex hits, or when no root exists.
inline PhysTrajectory physical_simulate(const PhysicalPyramid& pyr, const PhysState& state0, double g, int n_bounces,
                                        std::optional<Face> resting_on = std::nullopt) {
    PhysTrajectory traj;
    traj.states.push_back(state0);
    PhysState s = state0;
    std::optional<Face> current = resting_on;
    for (int i = 0; i < n_bounces; ++i) {
        auto hit = next_arc_hit(pyr, s, g, current);
        if (!hit) {
            traj.termination = Termination::Escaped;
            break;
        }
        PhysState arrived = flight(s, hit->time, g);
        // Snap onto the plane to remove roundoff before the containment test.
        const Plane<double>& pl = pyr.plane(hit->face);
        arrived.position = arrived.position - pl.evaluate(arrived.position) * pl.normal;
        traj.pre_bounce.push_back(arrived);
        traj.faces.push_back(hit->face);
        Barycentric<double> w = barycentric_of(pyr.tet().face_triangle(hit->face), arrived.position);
        if (!barycentric_strictly_positive(w)) {
            traj.termination = Termination::EdgeOrVertexHit;
            break;
        }
        arrived.velocity = bounce(arrived.velocity, pl.normal);
        traj.states.push_back(arrived);
        s = arrived;
        current = hit->face;
    }
    return traj;
}

/// Independent certification of a candidate: re-simulates the orbit with
/// event detection and checks the face schedule, strict interiority of every
/// bounce, and closure.
inline bool forward_check(const PhysicalSolution& sol, const PhysicalPyramid& pyr, const ReflectionOrder& order) {
    const UnknownVector& u = sol.u;
    if (!u.physically_positive()) return false;
    PhysState s0 = u.initial_state();
    Barycentric<double> w;
    try {
        w = barycentric_of(pyr.tet().face_triangle(Face::ABC), s0.position);
    } catch (const BilliardError&) {
        return false;
    }
    if (!barycentric_strictly_positive(w)) return false;
    PhysTrajectory traj = physical_simulate(pyr, s0, u.g, 4, Face::ABC);
    if (traj.termination != Termination::Completed || traj.faces.size() != 4) return false;
    const auto expected = order.bounce_faces();
    for (int i = 0; i < 4; ++i)
        if (traj.faces[i] != expected[i]) return false;
    const PhysState& end = traj.states.back();
    const double tol = ScalarTraits<double>::tolerance;
    if (norm(end.position - s0.position) > tol * pyr.scale()) return false;
    if (norm(end.velocity - s0.velocity) > tol * norm(s0.velocity)) return false;
    return true;
}

inline double energy_drift(const UnknownVector& u, const PhysicalPyramid& pyr, const ReflectionOrder& order) {
    PhysState s0 = u.initial_state();
    const double e0 = energy(s0, u.g);
    PhysTrajectory traj = physical_simulate(pyr, s0, u.g, 4, Face::ABC);
    double worst = 0.0;
    for (const auto& st : traj.pre_bounce) worst = std::max(worst, std::fabs(energy(st, u.g) - e0));
    for (const auto& st : traj.states) worst = std::max(worst, std::fabs(energy(st, u.g) - e0));
    (void)order;
    return worst / std::max(std::fabs(e0), 1e-300);
}

struct SolverOptions {
    int max_iterations = 100;
    double tolerance = 1e-10;         // on ||residual|| / pyramid scale
    double singular_cutoff = 1e-12;   // relative to the largest singular value
    int polish_iterations = 3;        // extra steps once under tolerance
};

namespace detail {

using Jacobian = Eigen::Matrix<double, 9, 8>;

/// Unknowns of the gauge-fixed system: {a, b, k, l, m, g, t1, t4}.
inline std::array<double, 10> expand(const Eigen::Matrix<double, 8, 1>& x, double t) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], 1.0, t, x[7]};
}

inline Eigen::Matrix<double, 9, 1> residual_and_jacobian(const Eigen::Matrix<double, 8, 1>& x, double t,
                                                         const PhysicalPyramid& pyr, const ReflectionOrder& order,
                                                         Jacobian* jac) {
    using D = Dual<8>;
    static constexpr int free_slot[10] = {0, 1, 2, 3, 4, 5, 6, -1, -1, 7};
    std::array<D, 10> u;
    const std::array<double, 10> plain = expand(x, t);
    for (int i = 0; i < 10; ++i)
        u[i] = free_slot[i] >= 0 ? D::variable(plain[i], static_cast<std::size_t>(free_slot[i])) : D(plain[i]);
    std::array<D, 9> r = closure_residual<D>(u, pyr, order);
    Eigen::Matrix<double, 9, 1> out;
    for (int i = 0; i < 9; ++i) {
        out[i] = r[i].v;
        if (jac)
            for (int j = 0; j < 8; ++j) (*jac)(i, j) = r[i].d[j];
    }
    return out;
}

}  // namespace detail

/// Assembles a PhysicalSolution for `u`, computing residual, bounce points,
/// energy drift and the certification flag (residual, positivity and
/// forward_check all required).
inline PhysicalSolution evaluate_solution(const UnknownVector& u, const PhysicalPyramid& pyr,
                                          const ReflectionOrder& order, double tolerance = 1e-10) {
    PhysicalSolution sol;
    sol.u = u;
    sol.bounce_points = lateral_bounce_points(u, pyr, order);
    sol.residual = residual_norm(residual(u, pyr, order)) / pyr.scale();
    sol.energy_drift = energy_drift(u, pyr, order);
    sol.certified = sol.residual < tolerance && u.physically_positive() && forward_check(sol, pyr, order);
    return sol;
}

/// Gauss-Newton on the gauge-fixed system (t2 = 1, t3 = t). Steps are
/// least-squares pseudo-solves via SVD with a relative singular-value cutoff,
/// so rank-deficient (non-isolated) solution sets are handled. Backtracking
/// halves the step until the residual decreases.
inline std::optional<PhysicalSolution> solve_at_t(const PhysicalPyramid& pyr, const ReflectionOrder& order, double t,
                                                  const UnknownVector& guess, const SolverOptions& opt = {}) {
    if (!(t > 0.0)) return std::nullopt;
    // Express the guess in the t2 = 1 gauge.
    UnknownVector g0 = guess.t2 > 0 ? guess.rescaled(1.0 / guess.t2) : guess;
    Eigen::Matrix<double, 8, 1> x;
    x << g0.a, g0.b, g0.k, g0.l, g0.m, g0.g, g0.t1, g0.t4;

    const double scale = pyr.scale();
    detail::Jacobian jac;
    Eigen::Matrix<double, 9, 1> r = detail::residual_and_jacobian(x, t, pyr, order, &jac);
    double rn = r.norm();
    bool converged = false;
    int polished = 0;
    for (int it = 0; it < opt.max_iterations && std::isfinite(rn); ++it) {
        if (rn / scale < opt.tolerance) {
            converged = true;
            if (polished++ >= opt.polish_iterations) break;
        }
        Eigen::JacobiSVD<detail::Jacobian> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(opt.singular_cutoff);
        Eigen::Matrix<double, 8, 1> step = -svd.solve(r);
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            Eigen::Matrix<double, 8, 1> trial = x + alpha * step;
            Eigen::Matrix<double, 9, 1> rt = detail::residual_and_jacobian(trial, t, pyr, order, nullptr);
            double tn = rt.norm();
            if (std::isfinite(tn) && tn < rn) {
                x = trial;
                r = detail::residual_and_jacobian(x, t, pyr, order, &jac);
                rn = r.norm();
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) {
            converged = rn / scale < opt.tolerance;
            break;
        }
    }
    if (!converged && rn / scale < opt.tolerance) converged = true;
    if (!converged) return std::nullopt;

    UnknownVector u = UnknownVector::from_array(detail::expand(x, t));
    PhysicalSolution sol = evaluate_solution(u, pyr, order, opt.tolerance);
    if (!sol.certified) return std::nullopt;
    return sol;
}


/// Random guess for the multistart: start point uniform in the base, velocity
/// direction on the upward hemisphere, time scale log-uniform over four
/// decades, speed and g matched to the pyramid size at that time scale.
inline UnknownVector random_guess(const PhysicalPyramid& pyr, double t, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& tet = pyr.tet();
    double r1 = unit(rng), r2 = unit(rng);
    if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    const Vec3<double> p = tet.A() + r1 * (tet.B() - tet.A()) + r2 * (tet.C() - tet.A());
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double cz = unit(rng);
    const double sz = std::sqrt(1.0 - cz * cz);
    const double tau = std::exp(std::log(0.01) + unit(rng) * std::log(1e4));
    const double speed = pyr.scale() * (0.2 + 3.0 * unit(rng)) / tau;
    UnknownVector u;
    u.a = p.x;
    u.b = p.y;
    u.k = speed * sz * std::cos(phi);
    u.l = speed * sz * std::sin(phi);
    u.m = speed * cz;
    u.g = pyr.scale() * (0.1 + 5.0 * unit(rng)) / (tau * tau);
    u.t1 = tau * (0.05 + 2.0 * unit(rng));
    u.t2 = 1.0;
    u.t3 = t;
    u.t4 = tau * (0.05 + 2.0 * unit(rng));
    return u;
}

/// Guess near the zero-gravity limit: the straight 4-cycle of the same order
/// (when it exists) with a small positive g, in the t2 = 1 gauge.
inline std::optional<UnknownVector> straight_line_guess(const PhysicalPyramid& pyr, const ReflectionOrder& order,
                                                        double* ratio = nullptr) {
    auto cycle = find_cycle(pyr.tet(), order);
    if (!cycle) return std::nullopt;
    const double s = cycle->flight_params[1];
    UnknownVector u;
    u.a = cycle->start.x;
    u.b = cycle->start.y;
    u.k = cycle->direction.x * s;
    u.l = cycle->direction.y * s;
    u.m = cycle->direction.z * s;
    u.g = 1e-3 * pyr.scale();
    u.t1 = cycle->flight_params[0] / s;
    u.t2 = 1.0;
    u.t3 = cycle->flight_params[2] / s;
    u.t4 = cycle->flight_params[3] / s;
    if (ratio) *ratio = u.t3;
    return u;
}

struct FamilySample {
    double t;
    PhysicalSolution solution;
};

/// One continuation branch: solutions at grid values of t (plus refined
/// endpoints), sorted by t.
struct FamilyBranch {
    int id = 0;
    std::vector<FamilySample> samples;
    std::vector<std::pair<double, double>> intervals;

    [[nodiscard]] std::vector<Vec2<double>> start_curve() const {
        std::vector<Vec2<double>> pts;
        for (const auto& s : samples) pts.push_back(s.solution.start());
        return pts;
    }
    [[nodiscard]] const FamilySample* at(double t) const {
        for (const auto& s : samples)
            if (s.t == t) return &s;
        return nullptr;
    }
};

struct FamilyScan {
    ReflectionOrder order = ReflectionOrder::canonical(1);
    std::vector<double> t_grid;
    std::vector<FamilyBranch> branches;

    /// Solution at grid value index i from the lowest-numbered branch alive there.
    [[nodiscard]] std::optional<PhysicalSolution> at_grid(std::size_t i) const {
        for (const auto& br : branches)
            if (const FamilySample* s = br.at(t_grid[i])) return s->solution;
        return std::nullopt;
    }

    /// Union of the branch intervals.
    [[nodiscard]] std::vector<std::pair<double, double>> admissible_intervals() const {
        std::vector<std::pair<double, double>> all;
        for (const auto& br : branches) all.insert(all.end(), br.intervals.begin(), br.intervals.end());
        std::sort(all.begin(), all.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& iv : all) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        return merged;
    }
};

struct FamilyScanOptions {
    int multistart = 64;
    std::uint64_t seed = 0;
    double endpoint_tolerance = 1e-3;  // bisection width in t
    double cluster_radius = 1e-2;      // relative to the pyramid scale
    int max_substep_halvings = 8;
    unsigned threads = 0;               // 0: worker_threads()
    SolverOptions solver;
};

namespace detail {

/// Warm-started step from a solution at `from` to ratio `to`, subdividing when
/// a direct step fails or the start point jumps by more than a cluster radius.
inline std::optional<PhysicalSolution> continue_to(const PhysicalPyramid& pyr, const ReflectionOrder& order,
                                                   const PhysicalSolution& from, double t_from, double t_to,
                                                   const FamilyScanOptions& opt) {
    const double jump = opt.cluster_radius * pyr.scale();
    auto step = [&](const PhysicalSolution& s, double t) -> std::optional<PhysicalSolution> {
        UnknownVector guess = s.u;
        guess.t3 = t;
        auto r = solve_at_t(pyr, order, t, guess, opt.solver);
        if (r && norm(Vec3<double>{r->u.a - s.u.a, r->u.b - s.u.b, 0.0}) > jump) return std::nullopt;
        return r;
    };
    PhysicalSolution cur = from;
    double t_cur = t_from;
    double h = t_to - t_from;
    int halvings = 0;
    while (t_cur != t_to) {
        double t_next = (std::fabs(t_to - t_cur) <= std::fabs(h)) ? t_to : t_cur + h;
        if (auto r = step(cur, t_next)) {
            cur = *r;
            t_cur = t_next;
        } else {
            if (++halvings > opt.max_substep_halvings) return std::nullopt;
            h *= 0.5;
        }
    }
    return cur;
}

/// Last t in the direction of `t_fail` reachable from `ok`, by bisection.
inline double refine_endpoint(const PhysicalPyramid& pyr, const ReflectionOrder& order, PhysicalSolution ok,
                              double t_ok, double t_fail, const FamilyScanOptions& opt) {
    while (std::fabs(t_fail - t_ok) > opt.endpoint_tolerance) {
        double mid = 0.5 * (t_ok + t_fail);
        if (auto r = continue_to(pyr, order, ok, t_ok, mid, opt)) {
            ok = *r;
            t_ok = mid;
        } else {
            t_fail = mid;
        }
    }
    return t_ok;
}

}  // namespace detail

/// Traces solution families over `t_grid` (sorted, positive). Seeds are the
/// perturbed straight-line cycle and `multistart` random guesses at every
/// grid value; each seed not already on a known branch is continued in both
/// directions by warm starts, with interval ends bisected. Start points
/// within the cluster radius at the same t belong to the same branch.
inline FamilyScan scan_family(const PhysicalPyramid& pyr, const ReflectionOrder& order, std::vector<double> t_grid,
                              const FamilyScanOptions& opt = {}) {
    if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()) || !(t_grid.front() > 0.0))
        throw BilliardError(ErrorKind::InvalidArgument, "t grid must be sorted and positive");
    if (opt.multistart < 1) throw BilliardError(ErrorKind::InvalidArgument, "multistart must be at least 1");
    FamilyScan scan;
    scan.order = order;
    scan.t_grid = t_grid;
    const std::size_t n = t_grid.size();
    const double radius = opt.cluster_radius * pyr.scale();

    auto matches = [&](const PhysicalSolution& s, double t) -> FamilyBranch* {
        for (auto& br : scan.branches)
            if (const FamilySample* q = br.at(t); q && norm(Vec3<double>{q->solution.u.a - s.u.a,
                                                                          q->solution.u.b - s.u.b, 0.0}) <= radius)
                return &br;
        return nullptr;
    };

    // An off-grid seed duplicates a branch whose interval covers its t when
    // continuing it to that branch's nearest sample lands on the sample.
    auto matches_off_grid = [&](const PhysicalSolution& s, double t) {
        for (auto& br : scan.branches) {
            bool covered = false;
            for (const auto& iv : br.intervals) covered = covered || (iv.first <= t && t <= iv.second);
            if (!covered || br.samples.empty()) continue;
            const FamilySample* near = &br.samples.front();
            for (const auto& q : br.samples)
                if (std::fabs(q.t - t) < std::fabs(near->t - t)) near = &q;
            auto r = detail::continue_to(pyr, order, s, t, near->t, opt);
            if (r && norm(Vec3<double>{r->u.a - near->solution.u.a, r->u.b - near->solution.u.b, 0.0}) <= radius)
                return true;
        }
        return false;
    };

    // Continue a seed solution at ratio t_seed in both directions through the
    // grid, adding a new branch unless it duplicates a known one.
    auto trace = [&](const PhysicalSolution& seed, double t_seed) {
        const bool on_grid = std::binary_search(t_grid.begin(), t_grid.end(), t_seed);
        if (on_grid ? matches(seed, t_seed) != nullptr : matches_off_grid(seed, t_seed)) return;
        FamilyBranch br;
        br.id = static_cast<int>(scan.branches.size());
        br.samples.push_back({t_seed, seed});
        double lo = t_seed, hi = t_seed;
        for (int dir : {-1, +1}) {
            PhysicalSolution cur = seed;
            double t_cur = t_seed;
            std::ptrdiff_t j = dir < 0 ? std::lower_bound(t_grid.begin(), t_grid.end(), t_seed) - t_grid.begin() - 1
                                       : std::upper_bound(t_grid.begin(), t_grid.end(), t_seed) - t_grid.begin();
            bool ended = false;
            for (; j >= 0 && j < static_cast<std::ptrdiff_t>(n); j += dir) {
                const double t_next = t_grid[static_cast<std::size_t>(j)];
                auto r = detail::continue_to(pyr, order, cur, t_cur, t_next, opt);
                if (!r) {
                    (dir < 0 ? lo : hi) = detail::refine_endpoint(pyr, order, cur, t_cur, t_next, opt);
                    ended = true;
                    break;
                }
                if (matches(*r, t_next)) {  // ran into a known branch
                    (dir < 0 ? lo : hi) = t_next;
                    ended = true;
                    break;
                }
                cur = *r;
                t_cur = t_next;
                br.samples.push_back({t_next, cur});
            }
            if (!ended) (dir < 0 ? lo : hi) = t_cur;
        }
        std::sort(br.samples.begin(), br.samples.end(),
                  [](const FamilySample& x, const FamilySample& y) { return x.t < y.t; });
        br.intervals.emplace_back(lo, hi);
        scan.branches.push_back(std::move(br));
    };

    // Seeds next to the zero-gravity limit, on both sides of its ratio.
    double ratio = 0.0;
    if (auto guess = straight_line_guess(pyr, order, &ratio)) {
        for (double f : {1.0, 0.999, 1.001, 0.99, 1.01}) {
            const double t = ratio * f;
            UnknownVector g = *guess;
            g.t3 = t;
            if (auto s = solve_at_t(pyr, order, t, g, opt.solver)) trace(*s, t);
        }
    }

    // Multistart at every grid value; solves run concurrently, tracing is
    // sequential in grid order so results do not depend on thread timing.
    std::vector<std::vector<PhysicalSolution>> found(n);
    parallel_for(n, opt.threads ? opt.threads : worker_threads(), [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(order.canonical_index()), static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        for (int k = 0; k < opt.multistart; ++k) {
            auto s = solve_at_t(pyr, order, t_grid[i], random_guess(pyr, t_grid[i], rng), opt.solver);
            if (!s) continue;
            bool dup = false;
            for (const auto& f : found[i])
                if (norm(Vec3<double>{f.u.a - s->u.a, f.u.b - s->u.b, 0.0}) <= radius) dup = true;
            if (!dup) found[i].push_back(*s);
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& s : found[i])
            trace(s, t_grid[i]);
    return scan;
}

/// Log-spaced grid of `steps` values in [t_min, t_max].
inline std::vector<double> log_grid(double t_min, double t_max, int steps) {
    if (!(t_min > 0.0) || !(t_max >= t_min) || steps < 1)
        throw BilliardError(ErrorKind::InvalidArgument, "invalid t range");
    std::vector<double> g;
    for (int i = 0; i < steps; ++i)
        g.push_back(steps == 1 ? t_min : t_min * std::pow(t_max / t_min, static_cast<double>(i) / (steps - 1)));
    return g;
}

}  // namespace billiards
