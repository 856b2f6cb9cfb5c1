#pragma once

// File formats. Pyramids are read from JSON; cycle reports are written as
// JSON (rationals as "p/q" strings, floats as numbers); grids and scans as
// CSV with 17 significant digits.
//
// Pyramid file, either form (point lists may also be objects keyed by
// vertex label, e.g. {"A": [0,0,0], "B": ..., "C": ..., "D": ...}):
//   {"vertices": [[0,0,0], [4,0,0], [3,3,0], ["2","1","3"]]}
//   {"base": [[0,0],[15,0],[5,10]], "foot": ["15/2", 0], "height": 10}
// A base-only file ({"base": ...}) is accepted where only the base triangle
// is needed. Coordinates are integers, decimals or rational strings.

#include <billiards/cycle_map.hpp>
#include <billiards/error.hpp>
#include <billiards/geometry.hpp>
#include <billiards/math_cycle.hpp>
#include <billiards/physical.hpp>
#include <billiards/special_cases.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace billiards {

using json = nlohmann::json;

/// 17 significant digits.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// A JSON scalar as an exact rational. Integers are exact; floating-point
/// literals are read via their shortest decimal form, so 2.1 becomes 21/10.
inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) {
        double v = j.get<double>();
        char buf[512];
        auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
        if (res.ec != std::errc()) return Rational::from_double(v);
        return Rational::parse(std::string(buf, res.ptr));
    }
    throw std::invalid_argument("expected a number or rational string, got " + j.dump());
}

inline Vec3<Rational> vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector, got " + j.dump());
    return {rational_from_json(j[0]), rational_from_json(j[1]), rational_from_json(j[2])};
}

inline Vec2<Rational> vec2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-vector, got " + j.dump());
    return {rational_from_json(j[0]), rational_from_json(j[1])};
}

template <Scalar T>
T scalar_from_rational(const Rational& q) {
    if constexpr (ScalarTraits<T>::exact) {
        return q;
    } else {
        return q.to_double();
    }
}

template <Scalar T>
Vec3<T> vec3_from_rational(const Vec3<Rational>& v) {
    return {scalar_from_rational<T>(v.x), scalar_from_rational<T>(v.y), scalar_from_rational<T>(v.z)};
}

template <Scalar T>
Vec2<T> vec2_from_rational(const Vec2<Rational>& v) {
    return {scalar_from_rational<T>(v.x), scalar_from_rational<T>(v.y)};
}

/// Points listed either as an array or as an object keyed "A", "B", ...
inline std::vector<json> labeled_points(const json& j, std::size_t count, const std::string& key) {
    std::vector<json> out;
    if (j.is_array() && j.size() == count) {
        for (const auto& p : j) out.push_back(p);
    } else if (j.is_object() && j.size() == count) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string label(1, static_cast<char>('A' + i));
            if (!j.contains(label)) throw std::invalid_argument("\"" + key + "\" is missing vertex " + label);
            out.push_back(j[label]);
        }
    } else {
        throw std::invalid_argument("\"" + key + "\" must list " + std::to_string(count) + " points");
    }
    return out;
}

inline BaseTriangle<Rational> base_from_json(const json& j) {
    if (!j.contains("base")) {
        if (j.contains("vertices")) {
            auto v = labeled_points(j["vertices"], 4, "vertices");
            auto a = vec3_from_json(v[0]), b = vec3_from_json(v[1]), c = vec3_from_json(v[2]);
            if (!a.z.is_zero() || !b.z.is_zero() || !c.z.is_zero())
                throw std::invalid_argument("base vertices must lie in z = 0");
            return {{a.x, a.y}, {b.x, b.y}, {c.x, c.y}};
        }
        throw std::invalid_argument("pyramid file needs \"vertices\" or \"base\"");
    }
    auto b = labeled_points(j["base"], 3, "base");
    return {vec2_from_json(b[0]), vec2_from_json(b[1]), vec2_from_json(b[2])};
}

inline Tetrahedron<Rational> pyramid_from_json(const json& j) {
    if (j.contains("vertices")) {
        auto v = labeled_points(j["vertices"], 4, "vertices");
        return {vec3_from_json(v[0]), vec3_from_json(v[1]), vec3_from_json(v[2]), vec3_from_json(v[3])};
    }
    if (!j.contains("foot") || !j.contains("height"))
        throw std::invalid_argument("pyramid file needs \"vertices\" or \"base\", \"foot\" and \"height\"");
    BaseTriangle<Rational> base = base_from_json(j);
    return Tetrahedron<Rational>::canonical(base.A, base.B, base.C, vec2_from_json(j["foot"]),
                                            rational_from_json(j["height"]));
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

template <Scalar T>
json scalar_to_json(const T& v) {
    if constexpr (ScalarTraits<T>::exact) {
        return v.str();
    } else {
        return v;
    }
}

template <Scalar T>
json vec3_to_json(const Vec3<T>& v) {
    return json::array({scalar_to_json(v.x), scalar_to_json(v.y), scalar_to_json(v.z)});
}

template <Scalar T>
json mat3_to_json(const Mat3<T>& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(vec3_to_json(m.row(i)));
    return rows;
}

template <Scalar T>
json pyramid_to_json(const Tetrahedron<T>& tet) {
    json v = json::array();
    for (const auto& p : tet.vertices()) v.push_back(vec3_to_json(p));
    return {{"vertices", v}};
}

template <Scalar T>
json cycle_to_json(const FourCycle<T>& c) {
    json faces = json::array(), points = json::array(), params = json::array();
    for (int i = 0; i < 4; ++i) {
        faces.push_back(face_name(c.order.faces()[i]));
        points.push_back(vec3_to_json(c.points[i]));
        params.push_back(scalar_to_json(c.flight_params[i]));
    }
    return {{"order", c.order.str()},
            {"order_index", c.order.canonical_index()},
            {"faces", faces},
            {"start", vec3_to_json(c.start)},
            {"barycentric",
             {{"x", scalar_to_json(c.start_weights.x)},
              {"y", scalar_to_json(c.start_weights.y)},
              {"z", scalar_to_json(c.start_weights.z)}}},
            {"direction", vec3_to_json(c.direction)},
            {"points", points},
            {"flight_params", params},
            {"length", c.length()}};
}

/// Full report for `find-cycles`: per order the rotation matrix, its axis and
/// the certified cycle (or null).
template <Scalar T>
json cycle_report(const Tetrahedron<T>& tet) {
    json orders = json::array();
    json cycles = json::array();
    for (const auto& order : ReflectionOrder::all()) {
        json o = {{"order", order.str()}, {"order_index", order.canonical_index()}};
        Mat3<T> m = cycle_rotation_matrix(tet, order);
        o["rotation_matrix"] = mat3_to_json(m);
        try {
            o["axis"] = vec3_to_json(rotation_axis(m));
        } catch (const BilliardError& e) {
            o["axis"] = nullptr;
            o["axis_error"] = e.what();
        }
        auto c = find_cycle(tet, order);
        o["certified"] = c.has_value();
        if (c) cycles.push_back(cycle_to_json(*c));
        orders.push_back(o);
    }
    return {{"backend", ScalarTraits<T>::name},
            {"pyramid", pyramid_to_json(tet)},
            {"k_obtuse", count_obtuse_dihedrals(tet)},
            {"orders", orders},
            {"cycles", cycles}};
}

template <Scalar T>
struct ParsedCycle {
    ReflectionOrder order = ReflectionOrder::canonical(1);
    Vec3<T> start;
    Vec3<T> direction;
};

template <Scalar T>
struct ParsedReport {
    std::optional<Tetrahedron<T>> pyramid;
    std::vector<ParsedCycle<T>> cycles;
};

/// Reads a report written by cycle_report back into values that can be
/// passed to certify_cycle.
template <Scalar T>
ParsedReport<T> parse_cycle_report(const json& j) {
    auto vec = [](const json& v) -> Vec3<T> {
        if constexpr (ScalarTraits<T>::exact) {
            return vec3_from_json(v);
        } else {
            return {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
        }
    };
    ParsedReport<T> r;
    const auto& verts = j.at("pyramid").at("vertices");
    r.pyramid.emplace(vec(verts.at(0)), vec(verts.at(1)), vec(verts.at(2)), vec(verts.at(3)));
    for (const auto& c : j.at("cycles"))
        r.cycles.push_back({ReflectionOrder::parse(c.at("order").get<std::string>()), vec(c.at("start")),
                            vec(c.at("direction"))});
    return r;
}

template <Scalar T>
json trajectory_to_json(const Trajectory<T>& traj) {
    json pts = json::array(), faces = json::array();
    for (const auto& p : traj.points) pts.push_back(vec3_to_json(p));
    for (Face f : traj.faces) faces.push_back(face_name(f));
    const char* term = traj.termination == Termination::Completed         ? "completed"
                       : traj.termination == Termination::EdgeOrVertexHit ? "edge_or_vertex"
                                                                          : "escaped";
    return {{"points", pts}, {"faces", faces}, {"termination", term}};
}

inline json conjecture_to_json(const ConjectureReport& r) {
    return {{"k_obtuse", r.k_obtuse}, {"n_cycles", r.n_cycles}, {"conjecture_ok", r.verdict}};
}

// CSV writers.

inline void write_map_csv(std::ostream& os, const CycleMapGrid& grid) {
    os << "ox,oy,class,a,b\n";
    for (const auto& cell : grid.cells) {
        os << format_double(cell.foot.x) << ',' << format_double(cell.foot.y) << ',';
        if (!cell.classification) {
            os << "unclassifiable,,\n";
            continue;
        }
        const auto& c = *cell.classification;
        os << to_string(c.kind) << ',';
        if (c.kind != HeightClass::Gamma) os << format_double(c.a);
        os << ',';
        if (c.kind == HeightClass::Beta) os << format_double(c.b);
        os << '\n';
    }
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileSample>& profile) {
    os << "param,x,y,class,a,b\n";
    for (const auto& s : profile) {
        os << format_double(s.param) << ',' << format_double(s.foot.x) << ',' << format_double(s.foot.y) << ',';
        if (!s.classification) {
            os << "unclassifiable,,\n";
            continue;
        }
        const auto& c = *s.classification;
        os << to_string(c.kind) << ',';
        if (c.kind != HeightClass::Gamma) os << format_double(c.a);
        os << ',';
        if (c.kind == HeightClass::Beta) os << format_double(c.b);
        os << '\n';
    }
}

inline void write_scan_csv(std::ostream& os, const FamilyScan& scan) {
    os << "t,a,b,k,l,m,g,t1,t2,t3,t4,branch_id,residual\n";
    for (const auto& br : scan.branches)
        for (const auto& s : br.samples) {
            os << format_double(s.t);
            for (double v : s.solution.u.to_array()) os << ',' << format_double(v);
            os << ',' << br.id << ',' << format_double(s.solution.residual) << '\n';
        }
}

inline void write_height_samples_csv(std::ostream& os, const std::vector<HeightSample>& samples) {
    os << "h,exists\n";
    for (const auto& s : samples) os << format_double(s.h) << ',' << (s.exists ? 1 : 0) << '\n';
}

}  // namespace billiards
