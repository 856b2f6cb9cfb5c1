#pragma once

// Conjectured class regions of a map of cycles, read from a config file.
// Each region is an intersection of open half-planes a x + b y + c > 0;
// points in no region get the default class. Boundary pieces (segments and
// rays) are listed separately and only used for distance queries.

#include <billiards/cycle_map.hpp>
#include <billiards/error.hpp>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace billiards {

inline HeightClass height_class_from_string(const std::string& s) {
    if (s == "alpha") return HeightClass::Alpha;
    if (s == "beta") return HeightClass::Beta;
    if (s == "gamma") return HeightClass::Gamma;
    throw std::invalid_argument("unknown class \"" + s + "\"");
}

struct HalfPlane {
    double a, b, c;
    [[nodiscard]] bool contains(const Vec2<double>& p) const { return a * p.x + b * p.y + c > 0.0; }
};

struct ConjectureRegion {
    std::string name;
    HeightClass kind = HeightClass::Gamma;
    std::vector<HalfPlane> halfplanes;

    [[nodiscard]] bool contains(const Vec2<double>& p) const {
        for (const auto& h : halfplanes)
            if (!h.contains(p)) return false;
        return true;
    }
};

/// A segment (bounded) or a ray (from `p` along `d` without end).
struct BoundaryPiece {
    Vec2<double> p, d;
    bool ray = false;

    [[nodiscard]] double distance(const Vec2<double>& q) const {
        const double dd = dot(d, d);
        double s = dd > 0 ? dot(q - p, d) / dd : 0.0;
        s = std::max(0.0, ray ? s : std::min(1.0, s));
        const Vec2<double> foot = p + s * d;
        return std::hypot(q.x - foot.x, q.y - foot.y);
    }
};

struct ConjectureRegions {
    BaseTriangle<double> base;
    int order_index = 2;
    MapRegion window;
    HeightClass default_class = HeightClass::Gamma;
    std::vector<ConjectureRegion> regions;
    std::vector<BoundaryPiece> boundaries;

    [[nodiscard]] HeightClass classify(const Vec2<double>& p) const {
        for (const auto& r : regions)
            if (r.contains(p)) return r.kind;
        return default_class;
    }

    [[nodiscard]] double boundary_distance(const Vec2<double>& p) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : boundaries) best = std::min(best, b.distance(p));
        return best;
    }

    static ConjectureRegions from_json(const nlohmann::json& j) {
        auto v2 = [](const nlohmann::json& a) { return Vec2<double>{a.at(0).get<double>(), a.at(1).get<double>()}; };
        ConjectureRegions c;
        const auto& b = j.at("base");
        c.base = {v2(b.at(0)), v2(b.at(1)), v2(b.at(2))};
        c.order_index = j.value("order", 2);
        const auto& w = j.at("window");
        c.window = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(), w.at(3).get<double>()};
        c.default_class = height_class_from_string(j.value("default_class", std::string("gamma")));
        for (const auto& r : j.at("regions")) {
            ConjectureRegion reg;
            reg.name = r.value("name", std::string());
            reg.kind = height_class_from_string(r.at("class").get<std::string>());
            for (const auto& h : r.at("halfplanes"))
                reg.halfplanes.push_back({h.at(0).get<double>(), h.at(1).get<double>(), h.at(2).get<double>()});
            c.regions.push_back(std::move(reg));
        }
        for (const auto& piece : j.at("boundaries")) {
            if (piece.contains("segment")) {
                Vec2<double> p = v2(piece["segment"].at(0)), q = v2(piece["segment"].at(1));
                c.boundaries.push_back({p, q - p, false});
            } else if (piece.contains("ray")) {
                c.boundaries.push_back({v2(piece["ray"].at("from")), v2(piece["ray"].at("direction")), true});
            } else {
                throw std::invalid_argument("boundary piece must be a segment or a ray");
            }
        }
        return c;
    }
};

}  // namespace billiards
