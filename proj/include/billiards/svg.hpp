#pragma once

// Minimal SVG writer. Primitives are kept in insertion order per layer and
// coordinates are printed with fixed precision, so equal inputs give equal
// bytes.

#include <billiards/cycle_map.hpp>
#include <billiards/linalg.hpp>
#include <billiards/physical.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace billiards {

struct SvgStyle {
    std::string fill = "none";
    std::string stroke = "black";
    double stroke_width = 1.0;
    double opacity = 1.0;
};

struct SvgPolygon {
    std::vector<Vec2<double>> points;
    SvgStyle style;
};
struct SvgPolyline {
    std::vector<Vec2<double>> points;
    SvgStyle style;
};
struct SvgPoint {
    Vec2<double> at;
    double radius = 3.0;  // pixels
    SvgStyle style;
};
struct SvgText {
    Vec2<double> at;
    std::string text;
    double size = 12.0;  // pixels
    std::string color = "black";
};

using SvgPrimitive = std::variant<SvgPolygon, SvgPolyline, SvgPoint, SvgText>;

inline const char* class_color(HeightClass c) {
    switch (c) {
        case HeightClass::Alpha: return "#4c9be8";
        case HeightClass::Beta: return "#f2a541";
        case HeightClass::Gamma: return "#e5e5e5";
    }
    return "#000000";
}
inline constexpr const char* kUnclassifiableColor = "#d1495b";

/// World rectangle mapped onto a width x height pixel canvas, y pointing up.
class SvgScene {
public:
    SvgScene(double x0, double y0, double x1, double y1, int width = 800, int height = 800, int margin = 30)
        : x0_(x0), y0_(y0), x1_(x1), y1_(y1), width_(width), height_(height), margin_(margin) {
        if (!(x1 > x0) || !(y1 > y0)) throw BilliardError(ErrorKind::InvalidArgument, "empty SVG viewport");
        const double sx = (width - 2.0 * margin) / (x1 - x0);
        const double sy = (height - 2.0 * margin) / (y1 - y0);
        scale_ = std::min(sx, sy);
    }

    /// Viewport fitted to a set of points with a relative padding.
    static SvgScene fit(const std::vector<Vec2<double>>& pts, int width = 800, int height = 800, double pad = 0.05) {
        double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
        for (const auto& p : pts) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        if (pts.empty()) x0 = y0 = 0, x1 = y1 = 1;
        double span = std::max({x1 - x0, y1 - y0, 1e-12});
        return SvgScene(x0 - pad * span, y0 - pad * span, x1 + pad * span, y1 + pad * span, width, height);
    }

    void add(int layer, SvgPrimitive p) { layers_[layer].push_back(std::move(p)); }

    [[nodiscard]] std::string render() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
           << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        for (const auto& [layer, prims] : layers_) {
            os << "<g id=\"layer" << layer << "\">\n";
            for (const auto& p : prims) std::visit([&](const auto& q) { emit(os, q); }, p);
            os << "</g>\n";
        }
        os << "</svg>\n";
        return os.str();
    }

private:
    [[nodiscard]] std::string num(double v) const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return buf;
    }
    [[nodiscard]] std::string px(const Vec2<double>& p) const {
        return num(margin_ + (p.x - x0_) * scale_) + "," + num(height_ - margin_ - (p.y - y0_) * scale_);
    }
    [[nodiscard]] std::string points_attr(const std::vector<Vec2<double>>& pts) const {
        std::string s;
        for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + px(pts[i]);
        return s;
    }
    [[nodiscard]] std::string style_attr(const SvgStyle& st) const {
        std::string s = "fill=\"" + st.fill + "\" stroke=\"" + st.stroke + "\" stroke-width=\"" + num(st.stroke_width) + "\"";
        if (st.opacity < 1.0) s += " opacity=\"" + num(st.opacity) + "\"";
        return s;
    }
    void emit(std::ostream& os, const SvgPolygon& p) const {
        os << "<polygon points=\"" << points_attr(p.points) << "\" " << style_attr(p.style) << "/>\n";
    }
    void emit(std::ostream& os, const SvgPolyline& p) const {
        os << "<polyline points=\"" << points_attr(p.points) << "\" " << style_attr(p.style) << "/>\n";
    }
    void emit(std::ostream& os, const SvgPoint& p) const {
        auto c = px(p.at);
        auto comma = c.find(',');
        os << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1) << "\" r=\"" << num(p.radius)
           << "\" " << style_attr(p.style) << "/>\n";
    }
    void emit(std::ostream& os, const SvgText& t) const {
        auto c = px(t.at);
        auto comma = c.find(',');
        std::string text;
        for (char ch : t.text) {
            if (ch == '<') text += "&lt;";
            else if (ch == '>') text += "&gt;";
            else if (ch == '&') text += "&amp;";
            else text += ch;
        }
        os << "<text x=\"" << c.substr(0, comma) << "\" y=\"" << c.substr(comma + 1) << "\" font-size=\""
           << num(t.size) << "\" fill=\"" << t.color << "\">" << text << "</text>\n";
    }

    double x0_, y0_, x1_, y1_;
    int width_, height_, margin_;
    double scale_ = 1.0;
    std::map<int, std::vector<SvgPrimitive>> layers_;
};

namespace detail {

/// Segment of the line through p with direction d, clipped to a rectangle.
inline std::optional<std::pair<Vec2<double>, Vec2<double>>> clip_line(const Vec2<double>& p, const Vec2<double>& d,
                                                                      const MapRegion& r) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    auto slab = [&](double p0, double dv, double a, double b) {
        if (dv == 0.0) return p0 >= a && p0 <= b;
        double t0 = (a - p0) / dv, t1 = (b - p0) / dv;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        return lo <= hi;
    };
    if (!slab(p.x, d.x, r.x0, r.x1) || !slab(p.y, d.y, r.y0, r.y1)) return std::nullopt;
    return std::make_pair(Vec2<double>{p.x + lo * d.x, p.y + lo * d.y}, Vec2<double>{p.x + hi * d.x, p.y + hi * d.y});
}

}  // namespace detail

/// Colour-coded map of cycles with the base triangle and, when the base
/// allows it, the CC', FF', GG' overlay lines.
inline std::string render_cycle_map(const CycleMapGrid& grid, const BaseTriangle<double>& base) {
    const MapRegion& r = grid.region;
    SvgScene scene(r.x0, r.y0, r.x1, r.y1);
    const double dx = (r.x1 - r.x0) / grid.nx, dy = (r.y1 - r.y0) / grid.ny;
    for (const auto& cell : grid.cells) {
        const double cx = cell.foot.x, cy = cell.foot.y;
        std::string color = cell.classification ? class_color(cell.classification->kind) : kUnclassifiableColor;
        scene.add(0, SvgPolygon{{{cx - dx / 2, cy - dy / 2}, {cx + dx / 2, cy - dy / 2}, {cx + dx / 2, cy + dy / 2},
                                 {cx - dx / 2, cy + dy / 2}},
                                {color, "none", 0.0}});
    }
    scene.add(1, SvgPolygon{{base.A, base.B, base.C}, {"none", "black", 2.0}});
    try {
        auto o = overlay(base);
        auto line = [&](const Vec2<double>& p, const Vec2<double>& q, const char* color) {
            if (auto seg = detail::clip_line(p, q - p, r))
                scene.add(2, SvgPolyline{{seg->first, seg->second}, {"none", color, 1.5}});
        };
        line(base.C, o.C_prime, "#333333");
        line(o.F, o.F_prime, "#7a1f5c");
        line(o.G, o.G_prime, "#7a1f5c");
        for (auto [p, name] : {std::pair{o.F, "F"}, std::pair{o.G, "G"}}) {
            scene.add(3, SvgPoint{p, 3.0, {"black", "none", 0.0}});
            scene.add(3, SvgText{p, name});
        }
    } catch (const BilliardError&) {
        // right-angled or degenerate base: no overlay
    }
    for (auto [p, name] : {std::pair{base.A, "A"}, std::pair{base.B, "B"}, std::pair{base.C, "C"}})
        scene.add(3, SvgText{p, name});
    return scene.render();
}

/// Plot of the threshold a against the line parameter.
inline std::string render_profile(const std::vector<ProfileSample>& profile) {
    std::vector<Vec2<double>> pts;
    for (const auto& s : profile)
        if (s.classification && s.classification->kind != HeightClass::Gamma) pts.push_back({s.param, s.classification->a});
    std::vector<Vec2<double>> frame = pts;
    if (!profile.empty()) {
        frame.push_back({profile.front().param, 0.0});
        frame.push_back({profile.back().param, 0.0});
    }
    SvgScene scene = SvgScene::fit(frame, 800, 500);
    if (!frame.empty()) scene.add(0, SvgPolyline{{frame[frame.size() - 2], frame.back()}, {"none", "#999999", 1.0}});
    scene.add(1, SvgPolyline{pts, {"none", "#1f4e79", 2.0}});
    for (const auto& p : pts) scene.add(2, SvgPoint{p, 2.0, {"#1f4e79", "none", 0.0}});
    return scene.render();
}

/// Start curves of all branches inside the base triangle, with the branch
/// ends marked.
inline std::string render_start_curve(const FamilyScan& scan, const Tetrahedron<double>& tet) {
    const Vec2<double> a{tet.A().x, tet.A().y}, b{tet.B().x, tet.B().y}, c{tet.C().x, tet.C().y};
    SvgScene scene = SvgScene::fit({a, b, c});
    scene.add(0, SvgPolygon{{a, b, c}, {"#f7f7f7", "black", 2.0}});
    static const char* palette[] = {"#1f4e79", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085"};
    for (const auto& br : scan.branches) {
        const char* color = palette[static_cast<std::size_t>(br.id) % 6];
        auto curve = br.start_curve();
        scene.add(1, SvgPolyline{curve, {"none", color, 2.0}});
        if (!curve.empty()) {
            scene.add(2, SvgPoint{curve.front(), 4.0, {color, "none", 0.0}});
            scene.add(2, SvgPoint{curve.back(), 4.0, {"white", color, 1.5}});
        }
    }
    for (auto [p, name] : {std::pair{a, "A"}, std::pair{b, "B"}, std::pair{c, "C"}}) scene.add(3, SvgText{p, name});
    return scene.render();
}

/// Trajectory projected on the xy and xz planes, side by side, with the
/// pyramid edges.
inline std::string render_trajectory(const Tetrahedron<double>& tet, const std::vector<Vec3<double>>& path) {
    const double gap = 0.15 * tet.scale();
    double xspan = 0.0, xmin = std::numeric_limits<double>::infinity();
    for (const auto& v : tet.vertices()) xmin = std::min(xmin, v.x);
    for (const auto& v : tet.vertices()) xspan = std::max(xspan, v.x - xmin);
    const double shift = xspan + gap;
    auto xy = [](const Vec3<double>& p) { return Vec2<double>{p.x, p.y}; };
    auto xz = [&](const Vec3<double>& p) { return Vec2<double>{p.x + shift, p.z}; };
    std::vector<Vec2<double>> frame;
    for (const auto& v : tet.vertices()) {
        frame.push_back(xy(v));
        frame.push_back(xz(v));
    }
    for (const auto& p : path) {
        frame.push_back(xy(p));
        frame.push_back(xz(p));
    }
    SvgScene scene = SvgScene::fit(frame, 1000, 500);
    for (Edge e : kAllEdges) {
        auto [i, j] = edge_vertices(e);
        scene.add(0, SvgPolyline{{xy(tet.vertex(i)), xy(tet.vertex(j))}, {"none", "#777777", 1.0}});
        scene.add(0, SvgPolyline{{xz(tet.vertex(i)), xz(tet.vertex(j))}, {"none", "#777777", 1.0}});
    }
    std::vector<Vec2<double>> pxy, pxz;
    for (const auto& p : path) {
        pxy.push_back(xy(p));
        pxz.push_back(xz(p));
    }
    scene.add(1, SvgPolyline{pxy, {"none", "#c0392b", 1.5}});
    scene.add(1, SvgPolyline{pxz, {"none", "#c0392b", 1.5}});
    scene.add(2, SvgText{xy(tet.A()), "xy"});
    scene.add(2, SvgText{xz(tet.A()), "xz"});
    return scene.render();
}

/// Dense samples of a physical orbit (parabolic arcs) for plotting.
inline std::vector<Vec3<double>> sample_physical_path(const PhysTrajectory& traj, double g, int per_arc = 24) {
    std::vector<Vec3<double>> out;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        const PhysState& s = traj.states[i];
        const double dt = traj.states[i + 1].time - s.time;
        for (int k = 0; k < per_arc; ++k) out.push_back(flight(s, dt * k / per_arc, g).position);
    }
    if (!traj.states.empty()) out.push_back(traj.states.back().position);
    return out;
}

}  // namespace billiards
