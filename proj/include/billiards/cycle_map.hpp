#pragma once

// Map of cycles: for a fixed base triangle ABC in z = 0 and a foot point O,
// the apex D = O + h e_z sweeps upward. Depending on O, a 4-cycle of a given
// order exists for all h above a threshold (alpha), only on a bounded height
// window (beta), or never (gamma).

#include <billiards/error.hpp>
#include <billiards/geometry.hpp>
#include <billiards/math_cycle.hpp>
#include <billiards/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace billiards {

template <Scalar T>
struct BaseTriangle {
    Vec2<T> A, B, C;

    [[nodiscard]] double diameter() const {
        auto len = [](const Vec2<T>& p, const Vec2<T>& q) {
            return std::hypot(to_double(p.x - q.x), to_double(p.y - q.y));
        };
        return std::max({len(A, B), len(B, C), len(C, A)});
    }

    [[nodiscard]] BaseTriangle<double> to_float() const {
        auto cv = [](const Vec2<T>& p) { return Vec2<double>{to_double(p.x), to_double(p.y)}; };
        return {cv(A), cv(B), cv(C)};
    }
};

/// Whether the order's 4-cycle exists in the pyramid with apex above `foot`
/// at height `h`.
template <Scalar T>
bool cycle_exists(const BaseTriangle<T>& base, const Vec2<T>& foot, const T& h, const ReflectionOrder& order) {
    if (!(h > T(0))) throw BilliardError(ErrorKind::InvalidArgument, "height must be positive");
    Tetrahedron<T> tet = Tetrahedron<T>::canonical(base.A, base.B, base.C, foot, h);
    return find_cycle(tet, order).has_value();
}

enum class HeightClass { Alpha, Beta, Gamma };

inline const char* to_string(HeightClass c) {
    switch (c) {
        case HeightClass::Alpha: return "alpha";
        case HeightClass::Beta: return "beta";
        case HeightClass::Gamma: return "gamma";
    }
    return "?";
}

struct HeightSample {
    double h;
    bool exists;
};

struct HeightClassification {
    HeightClass kind = HeightClass::Gamma;
    double a = 0.0;      // lower threshold (alpha, beta)
    double b = 0.0;      // upper threshold (beta only)
    double h_max = 0.0;  // scan ceiling: "for all h > a" means every sample up to h_max
    ReflectionOrder order = ReflectionOrder::canonical(2);
    Vec2<double> foot;
};

/// Thrown by height_scan when existence switches on and off more than once.
class UnclassifiableError : public BilliardError {
public:
    UnclassifiableError(const std::string& what, std::vector<HeightSample> samples)
        : BilliardError(ErrorKind::Unclassifiable, what), samples_(std::move(samples)) {}
    [[nodiscard]] const std::vector<HeightSample>& samples() const { return samples_; }

private:
    std::vector<HeightSample> samples_;
};

struct HeightScanOptions {
    double h_max = 0.0;  // 0: 50 x base diameter
    double tol = 0.0;    // 0: 1e-3 x base diameter
    int geometric_samples = 64;
    int uniform_samples = 64;
};

/// Sample heights: geometric on (1e-3 diam, h_max) plus uniform on (0, h_max].
inline std::vector<double> height_samples(double diameter, double h_max, int n_geometric, int n_uniform) {
    std::vector<double> hs;
    const double lo = 1e-3 * diameter;
    for (int i = 0; i < n_geometric; ++i) {
        double f = n_geometric == 1 ? 1.0 : static_cast<double>(i) / (n_geometric - 1);
        hs.push_back(lo * std::pow(h_max / lo, f));
    }
    for (int i = 1; i <= n_uniform; ++i) hs.push_back(h_max * i / n_uniform);
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end(), [](double x, double y) { return std::fabs(x - y) <= 1e-12 * y; }),
             hs.end());
    return hs;
}

/// Classifies the existence pattern of `exists` over heights in (0, h_max].
/// Boundaries between existing and non-existing samples are refined by
/// bisection to width `opt.tol`; thresholds are reported at bisection
/// midpoints. `opt.h_max` and `opt.tol` must be resolved (positive).
template <typename ExistsFn>
HeightClassification classify_heights(ExistsFn&& exists, double diameter, const HeightScanOptions& opt) {
    if (!(opt.h_max > 0.0) || !(opt.tol > 0.0))
        throw BilliardError(ErrorKind::InvalidArgument, "h_max and tol must be positive");
    const std::vector<double> hs = height_samples(diameter, opt.h_max, opt.geometric_samples, opt.uniform_samples);
    std::vector<HeightSample> samples;
    samples.reserve(hs.size());
    for (double h : hs) samples.push_back({h, static_cast<bool>(exists(h))});

    // Runs of consecutive existing samples.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].exists) continue;
        if (!runs.empty() && runs.back().second + 1 == i)
            runs.back().second = i;
        else
            runs.emplace_back(i, i);
    }

    HeightClassification out;
    out.h_max = opt.h_max;
    if (runs.empty()) {
        out.kind = HeightClass::Gamma;
        return out;
    }
    if (runs.size() > 1) throw UnclassifiableError("existence interval is not connected over the sampled heights", samples);

    // Bisection between a non-existing height `off` and an existing height `on`.
    auto refine = [&](double off, double on) {
        while (std::fabs(on - off) > opt.tol) {
            double mid = 0.5 * (off + on);
            (exists(mid) ? on : off) = mid;
        }
        return 0.5 * (off + on);
    };

    auto [first, last] = runs.front();
    out.a = refine(first == 0 ? 0.0 : samples[first - 1].h, samples[first].h);
    if (last + 1 == samples.size()) {
        out.kind = HeightClass::Alpha;
    } else {
        out.kind = HeightClass::Beta;
        out.b = refine(samples[last + 1].h, samples[last].h);
    }
    return out;
}

/// Classifies a foot point by scanning apex heights (float backend).
inline HeightClassification height_scan(const BaseTriangle<double>& base, const Vec2<double>& foot,
                                        const ReflectionOrder& order, HeightScanOptions opt = {}) {
    const double diam = base.diameter();
    if (opt.h_max <= 0.0) opt.h_max = 50.0 * diam;
    if (opt.tol <= 0.0) opt.tol = 1e-3 * diam;
    HeightClassification out =
        classify_heights([&](double h) { return cycle_exists(base, foot, h, order); }, diam, opt);
    out.order = order;
    out.foot = foot;
    return out;
}

struct MapRegion {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

struct MapCell {
    Vec2<double> foot;
    std::optional<HeightClassification> classification;  // empty when unclassifiable
    std::string error;
};

struct CycleMapGrid {
    MapRegion region;
    int nx = 0, ny = 0;
    ReflectionOrder order = ReflectionOrder::canonical(2);
    double h_max = 0.0;
    std::vector<MapCell> cells;  // row-major: index = iy * nx + ix

    [[nodiscard]] const MapCell& at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy * nx + ix)]; }
};

/// Height scan at every cell centre of an nx x ny grid over `region`.
inline CycleMapGrid build_map(const BaseTriangle<double>& base, const MapRegion& region, int nx, int ny,
                              const ReflectionOrder& order, const HeightScanOptions& opt = {}, unsigned threads = 0) {
    if (nx < 1 || ny < 1) throw BilliardError(ErrorKind::InvalidArgument, "grid resolution must be at least 1x1");
    CycleMapGrid grid;
    grid.region = region;
    grid.nx = nx;
    grid.ny = ny;
    grid.order = order;
    grid.h_max = opt.h_max > 0 ? opt.h_max : 50.0 * base.diameter();
    grid.cells.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const double dx = (region.x1 - region.x0) / nx;
    const double dy = (region.y1 - region.y0) / ny;
    parallel_for(grid.cells.size(), threads ? threads : worker_threads(), [&](std::size_t idx) {
        const int ix = static_cast<int>(idx % static_cast<std::size_t>(nx));
        const int iy = static_cast<int>(idx / static_cast<std::size_t>(nx));
        MapCell& cell = grid.cells[idx];
        cell.foot = {region.x0 + (ix + 0.5) * dx, region.y0 + (iy + 0.5) * dy};
        try {
            cell.classification = height_scan(base, cell.foot, order, opt);
        } catch (const BilliardError& e) {
            cell.error = e.what();
        }
    });
    return grid;
}

/// The auxiliary construction drawn over the map: C' is C turned by a half
/// turn about the midpoint of AB; G, F are the feet of the altitudes from A
/// and B in ABC, and G', F' their analogues in ABC'.
template <Scalar T>
struct OverlayConstruction {
    Vec2<T> C_prime, F, G, F_prime, G_prime;

    /// FF' and GG' are always parallel (exact on rationals).
    [[nodiscard]] bool ff_gg_parallel() const {
        T c = cross(F_prime - F, G_prime - G);
        if constexpr (ScalarTraits<T>::exact) {
            return c.is_zero();
        } else {
            double scale = std::hypot(F_prime.x - F.x, F_prime.y - F.y) * std::hypot(G_prime.x - G.x, G_prime.y - G.y);
            return std::fabs(c) <= 1e-9 * scale;
        }
    }
};

template <Scalar T>
Vec2<T> foot_of_perpendicular(const Vec2<T>& p, const Vec2<T>& x, const Vec2<T>& y) {
    Vec2<T> d = y - x;
    T s = dot(p - x, d) / dot(d, d);
    return x + s * d;
}

template <Scalar T>
OverlayConstruction<T> overlay(const BaseTriangle<T>& base) {
    if (ScalarTraits<T>::sign(cross(base.B - base.A, base.C - base.A), base.diameter() * base.diameter()) == 0)
        throw BilliardError(ErrorKind::DegenerateInput, "degenerate base triangle");
    OverlayConstruction<T> o;
    o.C_prime = base.A + base.B - base.C;
    o.F = foot_of_perpendicular(base.B, base.A, base.C);
    o.G = foot_of_perpendicular(base.A, base.B, base.C);
    o.F_prime = foot_of_perpendicular(base.B, base.A, o.C_prime);
    o.G_prime = foot_of_perpendicular(base.A, base.B, o.C_prime);
    auto same = [&](const Vec2<T>& p, const Vec2<T>& q) {
        if constexpr (ScalarTraits<T>::exact) {
            return p == q;
        } else {
            return std::hypot(p.x - q.x, p.y - q.y) <= 1e-9 * base.diameter();
        }
    };
    if (same(o.F, base.A) || same(o.F, base.C) || same(o.G, base.B) || same(o.G, base.C))
        throw BilliardError(ErrorKind::RightAngleBase, "an altitude foot coincides with a vertex");
    return o;
}

/// Implicit line coef_x * x + coef_y * y = rhs.
struct Line2 {
    double coef_x = 0, coef_y = 0, rhs = 0;

    /// Point on the line with the given y (or x, for horizontal lines).
    [[nodiscard]] Vec2<double> at(double param) const {
        if (coef_x != 0.0) return {(rhs - coef_y * param) / coef_x, param};
        return {param, rhs / coef_y};
    }
};

struct ProfileSample {
    double param;  // y, or x for horizontal lines
    Vec2<double> foot;
    std::optional<HeightClassification> classification;
    std::string error;
};

/// Threshold a along a line of foot points, sampled uniformly in [from, to].
inline std::vector<ProfileSample> a_profile(const BaseTriangle<double>& base, const Line2& line, double from, double to,
                                            int samples, const ReflectionOrder& order, const HeightScanOptions& opt = {},
                                            unsigned threads = 0) {
    if (samples < 2) throw BilliardError(ErrorKind::InvalidArgument, "a profile needs at least two samples");
    if (line.coef_x == 0.0 && line.coef_y == 0.0) throw BilliardError(ErrorKind::InvalidArgument, "degenerate line");
    std::vector<ProfileSample> out(static_cast<std::size_t>(samples));
    parallel_for(out.size(), threads ? threads : worker_threads(), [&](std::size_t i) {
        ProfileSample& s = out[i];
        s.param = from + (to - from) * static_cast<double>(i) / (samples - 1);
        s.foot = line.at(s.param);
        try {
            s.classification = height_scan(base, s.foot, order, opt);
        } catch (const BilliardError& e) {
            s.error = e.what();
        }
    });
    return out;
}

}  // namespace billiards
