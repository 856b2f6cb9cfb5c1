#pragma once

// Command-line front end: argument parsing into a RunConfig and dispatch to
// the library. Exit codes: 0 success, 1 usage, 2 computation error,
// 3 uniqueness violation in the cycle solver.

#include <billiards/cycle_map.hpp>
#include <billiards/io.hpp>
#include <billiards/math_cycle.hpp>
#include <billiards/physical.hpp>
#include <billiards/regions.hpp>
#include <billiards/special_cases.hpp>
#include <billiards/svg.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace billiards::cli {

enum ExitCode { kOk = 0, kUsage = 1, kComputation = 2, kUniqueness = 3 };

struct RunConfig {
    std::string subcommand;
    std::string pyramid_path;
    std::string backend;  // empty until parsed: exact for straight-line commands, float otherwise
    int order = 0;  // 0: all orders where applicable
    std::uint64_t seed = 0;
    std::string out_path;  // empty: stdout
    std::string svg_path;

    // simulate / physical-simulate
    std::string start, direction, velocity;
    int bounces = 4;
    double gravity = 1.0;

    // cycle-map / height-scan / a-profile
    std::string region = "-10,0,25,35";
    std::string res = "40,40";
    std::string foot;
    std::string line;
    std::string range = "0,10";
    int samples = 41;
    double h_max = 0.0;
    double tol = 0.0;

    // physical-scan
    double t_min = 1e-3, t_max = 1e2;
    int t_steps = 40;
    int multistart = 64;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument parsing stopped: help was requested (code 0) or the command
/// line was invalid. Carries the text CLI11 would print.
class ParseFailure : public std::runtime_error {
public:
    ParseFailure(int code, std::string out, std::string err)
        : std::runtime_error(err), code_(code), out_(std::move(out)), err_(std::move(err)) {}
    [[nodiscard]] int code() const { return code_; }
    [[nodiscard]] const std::string& out() const { return out_; }
    [[nodiscard]] const std::string& err() const { return err_; }

private:
    int code_;
    std::string out_, err_;
};

/// Comma-separated list of exactly n rational literals.
inline std::vector<Rational> parse_rationals(const std::string& text, std::size_t n, const std::string& flag) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(Rational::parse(item));
        } catch (const std::invalid_argument& e) {
            throw UsageError(flag + ": " + e.what());
        }
    }
    if (out.size() != n) throw UsageError(flag + ": expected " + std::to_string(n) + " comma-separated values");
    return out;
}

inline std::vector<double> parse_doubles(const std::string& text, std::size_t n, const std::string& flag) {
    std::vector<double> out;
    for (const auto& q : parse_rationals(text, n, flag)) out.push_back(q.to_double());
    return out;
}

inline bool is_physical(const std::string& sub) { return sub == "physical-scan" || sub == "physical-simulate"; }
inline bool is_map(const std::string& sub) { return sub == "cycle-map" || sub == "height-scan" || sub == "a-profile"; }

/// Parses argv into a validated RunConfig. Throws UsageError (with the
/// offending flag named) or ParseFailure.
inline RunConfig parse_config(int argc, const char* const* argv) {
    RunConfig cfg;
    CLI::App app{"Period-4 billiard trajectories in triangular pyramids"};
    app.require_subcommand(1, 1);
    auto add_common = [&](CLI::App* sub, bool base_only) {
        if (base_only)
            sub->add_option("--pyramid-base,--pyramid", cfg.pyramid_path, "JSON file with the base triangle")
                ->required()
                ->check(CLI::ExistingFile);
        else
            sub->add_option("--pyramid", cfg.pyramid_path, "JSON pyramid file")->required()->check(CLI::ExistingFile);
        sub->add_option("--backend", cfg.backend, "exact or float")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--out", cfg.out_path, "output file (default stdout)");
        sub->add_option("--seed", cfg.seed, "random seed");
    };
    auto add_order = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--order", cfg.order, "reflection order 1, 2 or 3")->check(CLI::Range(1, 3));
        if (required) o->required();
    };

    auto* find = app.add_subcommand("find-cycles", "certified 4-cycles of a pyramid (JSON report)");
    add_common(find, false);
    add_order(find, false);

    auto* sim = app.add_subcommand("simulate", "straight-line billiard from a start point and direction");
    add_common(sim, false);
    sim->add_option("--start", cfg.start, "x,y,z")->required();
    sim->add_option("--dir", cfg.direction, "x,y,z")->required();
    sim->add_option("--bounces", cfg.bounces, "number of bounces")->check(CLI::PositiveNumber);
    sim->add_option("--svg", cfg.svg_path, "SVG output file");

    auto* map = app.add_subcommand("cycle-map", "alpha/beta/gamma map over foot points (CSV)");
    add_common(map, true);
    add_order(map, true);
    map->add_option("--region", cfg.region, "x0,y0,x1,y1");
    map->add_option("--res", cfg.res, "NX,NY");
    map->add_option("--h-max", cfg.h_max, "height scan ceiling (default 50 x base diameter)");
    map->add_option("--tol", cfg.tol, "threshold bisection tolerance (default 1e-3 x base diameter)");
    map->add_option("--svg", cfg.svg_path, "SVG output file");

    auto* hs = app.add_subcommand("height-scan", "classify one foot point (JSON)");
    add_common(hs, true);
    add_order(hs, true);
    hs->add_option("--foot", cfg.foot, "x,y")->required();
    hs->add_option("--h-max", cfg.h_max, "height scan ceiling (default 50 x base diameter)");
    hs->add_option("--tol", cfg.tol, "threshold bisection tolerance (default 1e-3 x base diameter)");

    auto* prof = app.add_subcommand("a-profile", "threshold a along a line a*x + b*y = c (CSV)");
    add_common(prof, true);
    add_order(prof, true);
    prof->add_option("--line", cfg.line, "a,b,c")->required();
    prof->add_option("--range", cfg.range, "from,to (y, or x for horizontal lines)");
    prof->add_option("--samples", cfg.samples)->check(CLI::Range(2, 100000));
    prof->add_option("--h-max", cfg.h_max, "height scan ceiling (default 50 x base diameter)");
    prof->add_option("--tol", cfg.tol, "threshold bisection tolerance (default 1e-3 x base diameter)");
    prof->add_option("--svg", cfg.svg_path, "SVG output file");

    auto* special = app.add_subcommand("special-checks", "corner, right-angle, symmetry and obtuse-angle checks (JSON)");
    add_common(special, false);

    auto* pscan = app.add_subcommand("physical-scan", "families of gravity 4-cycles over t = t3/t2 (CSV)");
    add_common(pscan, false);
    add_order(pscan, true);
    pscan->add_option("--t-min", cfg.t_min, "smallest ratio t3/t2")->check(CLI::PositiveNumber);
    pscan->add_option("--t-max", cfg.t_max, "largest ratio t3/t2")->check(CLI::PositiveNumber);
    pscan->add_option("--t-steps", cfg.t_steps, "log-spaced grid size")->check(CLI::Range(1, 100000));
    pscan->add_option("--multistart", cfg.multistart, "random guesses per grid value")->check(CLI::Range(1, 1000000));
    pscan->add_option("--svg", cfg.svg_path, "SVG output file");

    auto* psim = app.add_subcommand("physical-simulate", "gravity billiard from a base point (JSON)");
    add_common(psim, false);
    psim->add_option("--start", cfg.start, "x,y on the base")->required();
    psim->add_option("--velocity", cfg.velocity, "k,l,m")->required();
    psim->add_option("--g", cfg.gravity, "gravitational acceleration")->check(CLI::NonNegativeNumber);
    psim->add_option("--bounces", cfg.bounces, "number of bounces")->check(CLI::PositiveNumber);
    psim->add_option("--svg", cfg.svg_path, "SVG output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        int code = app.exit(e, o, er);
        throw ParseFailure(code == 0 ? kOk : kUsage, o.str(), er.str());
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.backend.empty()) cfg.backend = (is_physical(cfg.subcommand) || is_map(cfg.subcommand)) ? "float" : "exact";
    if (cfg.backend == "exact" && is_physical(cfg.subcommand))
        throw UsageError("--backend: the exact backend is not available for gravity billiards");
    if (cfg.backend == "exact" && is_map(cfg.subcommand))
        throw UsageError("--backend: map scans run in floating point only");
    if (cfg.subcommand == "physical-scan" && cfg.t_max < cfg.t_min) throw UsageError("--t-max: must be >= --t-min");

    // Validate literal lists now so errors name the flag.
    if (cfg.subcommand == "simulate") {
        parse_rationals(cfg.start, 3, "--start");
        parse_rationals(cfg.direction, 3, "--dir");
    }
    if (cfg.subcommand == "physical-simulate") {
        parse_rationals(cfg.start, 2, "--start");
        parse_rationals(cfg.velocity, 3, "--velocity");
    }
    if (cfg.subcommand == "cycle-map") {
        parse_rationals(cfg.region, 4, "--region");
        parse_rationals(cfg.res, 2, "--res");
    }
    if (cfg.subcommand == "height-scan") parse_rationals(cfg.foot, 2, "--foot");
    if (cfg.subcommand == "a-profile") {
        parse_rationals(cfg.line, 3, "--line");
        parse_rationals(cfg.range, 2, "--range");
    }
    return cfg;
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

template <Scalar T>
Tetrahedron<T> load_pyramid(const std::string& path) {
    Tetrahedron<Rational> q = pyramid_from_json(read_json_file(path));
    if constexpr (ScalarTraits<T>::exact) {
        return q;
    } else {
        return q.to_float();
    }
}

inline std::vector<ReflectionOrder> selected_orders(int order) {
    if (order == 0) {
        auto all = ReflectionOrder::all();
        return {all.begin(), all.end()};
    }
    return {ReflectionOrder::canonical(order)};
}

template <Scalar T>
std::string find_cycles_cmd(const RunConfig& cfg) {
    Tetrahedron<T> tet = load_pyramid<T>(cfg.pyramid_path);
    json report = cycle_report(tet);
    if (cfg.order != 0) {
        const std::string wanted = ReflectionOrder::canonical(cfg.order).str();
        json kept = json::array();
        for (const auto& c : report["cycles"])
            if (c["order"] == wanted) kept.push_back(c);
        report["cycles"] = kept;
    }
    return report.dump(2) + "\n";
}

template <Scalar T>
std::string simulate_cmd(const RunConfig& cfg) {
    Tetrahedron<T> tet = load_pyramid<T>(cfg.pyramid_path);
    auto s = parse_rationals(cfg.start, 3, "--start");
    auto d = parse_rationals(cfg.direction, 3, "--dir");
    Vec3<T> start{scalar_from_rational<T>(s[0]), scalar_from_rational<T>(s[1]), scalar_from_rational<T>(s[2])};
    Vec3<T> dir{scalar_from_rational<T>(d[0]), scalar_from_rational<T>(d[1]), scalar_from_rational<T>(d[2])};
    Trajectory<T> traj = simulate_billiard(tet, start, dir, cfg.bounces);
    if (!cfg.svg_path.empty()) {
        std::vector<Vec3<double>> path;
        for (const auto& p : traj.points) path.push_back(to_double(p));
        write_text(cfg.svg_path, render_trajectory(tet.to_float(), path), std::cout);
    }
    json j = trajectory_to_json(traj);
    j["backend"] = ScalarTraits<T>::name;
    return j.dump(2) + "\n";
}

inline HeightScanOptions scan_options(const RunConfig& cfg) {
    HeightScanOptions opt;
    opt.h_max = cfg.h_max;
    opt.tol = cfg.tol;
    return opt;
}

inline json classification_to_json(const HeightClassification& c) {
    json j = {{"class", to_string(c.kind)},
              {"order", c.order.str()},
              {"foot", {c.foot.x, c.foot.y}},
              {"h_max", c.h_max}};
    if (c.kind != HeightClass::Gamma) j["a"] = c.a;
    if (c.kind == HeightClass::Beta) j["b"] = c.b;
    return j;
}

template <Scalar T>
std::string special_checks_cmd(const RunConfig& cfg) {
    Tetrahedron<T> tet = load_pyramid<T>(cfg.pyramid_path);
    json j;
    j["backend"] = ScalarTraits<T>::name;
    if (auto corner = right_corner_vertex(tet)) {
        CornerReport r = check_corner_pyramid(tet);
        j["corner"] = {{"vertex", std::string(1, "ABCD"[r.corner_vertex])}, {"n_cycles", r.n_cycles}, {"ok", r.ok}};
    } else {
        j["corner"] = nullptr;
    }
    json pairs = json::array();
    for (auto [f1, f2] : orthogonal_face_pairs(tet))
        pairs.push_back({{"faces", {face_name(f1), face_name(f2)}},
                         {"reflections_commute", commuting_reflections_check(tet, f1, f2)}});
    j["orthogonal_pairs"] = pairs;
    ConjectureReport cr = conjecture_report(tet);
    j["k_obtuse"] = cr.k_obtuse;
    j["n_cycles"] = cr.n_cycles;
    j["conjecture_ok"] = cr.verdict;
    try {
        SymmetricPyramid<T> sp(tet);
        json s = {{"E", vec3_to_json(sp.E())}, {"E_prime", vec3_to_json(sp.E_prime())}};
        try {
            auto c = symmetric_cycle_direct(sp);
            s["cycle"] = c ? cycle_to_json(*c) : json(nullptr);
        } catch (const BilliardError& e) {
            s["cycle"] = nullptr;
            s["error"] = e.what();
        }
        j["symmetric"] = s;
    } catch (const BilliardError&) {
        j["symmetric"] = nullptr;
    }
    return j.dump(2) + "\n";
}

inline json physical_solution_to_json(const PhysicalSolution& s) {
    json bp = json::array();
    for (const auto& p : s.bounce_points) bp.push_back(vec3_to_json(p));
    const auto u = s.u.to_array();
    static const char* names[] = {"a", "b", "k", "l", "m", "g", "t1", "t2", "t3", "t4"};
    json uj;
    for (int i = 0; i < 10; ++i) uj[names[i]] = u[i];
    return {{"unknowns", uj}, {"bounce_points", bp}, {"residual", s.residual}, {"energy_drift", s.energy_drift},
            {"certified", s.certified}};
}

}  // namespace detail

/// Executes a parsed configuration; results go to cfg.out_path or `out`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const bool exact = cfg.backend == "exact";
    try {
        std::string text;
        const std::string& sub = cfg.subcommand;
        if (sub == "find-cycles") {
            text = exact ? detail::find_cycles_cmd<Rational>(cfg) : detail::find_cycles_cmd<double>(cfg);
        } else if (sub == "simulate") {
            text = exact ? detail::simulate_cmd<Rational>(cfg) : detail::simulate_cmd<double>(cfg);
        } else if (sub == "special-checks") {
            text = exact ? detail::special_checks_cmd<Rational>(cfg) : detail::special_checks_cmd<double>(cfg);
        } else if (sub == "cycle-map") {
            BaseTriangle<double> base = base_from_json(read_json_file(cfg.pyramid_path)).to_float();
            auto r = parse_doubles(cfg.region, 4, "--region");
            auto n = parse_doubles(cfg.res, 2, "--res");
            CycleMapGrid grid = build_map(base, {r[0], r[1], r[2], r[3]}, static_cast<int>(n[0]), static_cast<int>(n[1]),
                                          ReflectionOrder::canonical(cfg.order), detail::scan_options(cfg));
            std::ostringstream csv;
            write_map_csv(csv, grid);
            text = csv.str();
            if (!cfg.svg_path.empty()) detail::write_text(cfg.svg_path, render_cycle_map(grid, base), out);
        } else if (sub == "height-scan") {
            BaseTriangle<double> base = base_from_json(read_json_file(cfg.pyramid_path)).to_float();
            auto f = parse_doubles(cfg.foot, 2, "--foot");
            try {
                auto c = height_scan(base, {f[0], f[1]}, ReflectionOrder::canonical(cfg.order), detail::scan_options(cfg));
                text = detail::classification_to_json(c).dump(2) + "\n";
            } catch (const UnclassifiableError& e) {
                std::ostringstream csv;
                write_height_samples_csv(csv, e.samples());
                err << "error: " << e.what() << "\n" << csv.str();
                return kComputation;
            }
        } else if (sub == "a-profile") {
            BaseTriangle<double> base = base_from_json(read_json_file(cfg.pyramid_path)).to_float();
            auto l = parse_doubles(cfg.line, 3, "--line");
            auto rg = parse_doubles(cfg.range, 2, "--range");
            auto prof = a_profile(base, {l[0], l[1], l[2]}, rg[0], rg[1], cfg.samples,
                                  ReflectionOrder::canonical(cfg.order), detail::scan_options(cfg));
            std::ostringstream csv;
            write_profile_csv(csv, prof);
            text = csv.str();
            if (!cfg.svg_path.empty()) detail::write_text(cfg.svg_path, render_profile(prof), out);
        } else if (sub == "physical-scan") {
            PhysicalPyramid pyr(detail::load_pyramid<double>(cfg.pyramid_path));
            FamilyScanOptions opt;
            opt.multistart = cfg.multistart;
            opt.seed = cfg.seed;
            FamilyScan scan = scan_family(pyr, ReflectionOrder::canonical(cfg.order),
                                          log_grid(cfg.t_min, cfg.t_max, cfg.t_steps), opt);
            std::ostringstream csv;
            write_scan_csv(csv, scan);
            text = csv.str();
            if (!cfg.svg_path.empty()) detail::write_text(cfg.svg_path, render_start_curve(scan, pyr.tet()), out);
        } else if (sub == "physical-simulate") {
            PhysicalPyramid pyr(detail::load_pyramid<double>(cfg.pyramid_path));
            auto s = parse_doubles(cfg.start, 2, "--start");
            auto v = parse_doubles(cfg.velocity, 3, "--velocity");
            PhysState s0{{s[0], s[1], 0.0}, {v[0], v[1], v[2]}, 0.0};
            PhysTrajectory traj = physical_simulate(pyr, s0, cfg.gravity, cfg.bounces, Face::ABC);
            json states = json::array(), faces = json::array();
            for (const auto& st : traj.states)
                states.push_back({{"time", st.time},
                                  {"position", vec3_to_json(st.position)},
                                  {"velocity", vec3_to_json(st.velocity)}});
            for (Face f : traj.faces) faces.push_back(face_name(f));
            const char* term = traj.termination == Termination::Completed         ? "completed"
                               : traj.termination == Termination::EdgeOrVertexHit ? "edge_or_vertex"
                                                                                  : "escaped";
            text = json{{"states", states}, {"faces", faces}, {"termination", term}}.dump(2) + "\n";
            if (!cfg.svg_path.empty()) {
                auto path = sample_physical_path(traj, cfg.gravity);
                detail::write_text(cfg.svg_path, render_trajectory(pyr.tet(), path), out);
            }
        } else {
            err << "error: unknown subcommand " << sub << "\n";
            return kUsage;
        }
        detail::write_text(cfg.out_path, text, out);
        return kOk;
    } catch (const BilliardError& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::UniquenessViolation ? kUniqueness : kComputation;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kComputation;
    }
}

/// Full entry point: parse then run.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(argc, argv);
    } catch (const ParseFailure& e) {
        out << e.out();
        err << e.err();
        return e.code();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    return run(cfg, out, err);
}

}  // namespace billiards::cli
