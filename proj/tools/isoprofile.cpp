#include "isoprofile/calibration_engine.hpp"
#include "isoprofile/conformal_forge.hpp"
#include "isoprofile/cusp_assembly.hpp"
#include "isoprofile/errors.hpp"
#include "isoprofile/level_graph.hpp"
#include "isoprofile/numerics.hpp"
#include "isoprofile/oracle_bench.hpp"
#include "isoprofile/report.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace isoprofile;

namespace {

constexpr double pi = std::numbers::pi;

struct RunConfig {
    std::string command;
    std::string input;
    fs::path out = "isoprofile_out";
    std::uint64_t seed = 42;
    double tol = 1e-10;
    int trials = 200;
    int modes = 8;

    Json to_json() const
    {
        Json j = Json::object();
        j["command"] = command;
        if (!input.empty())
            j["input"] = input;
        j["seed"] = seed;
        j["tol"] = tol;
        j["trials"] = trials;
        j["modes"] = modes;
        return j;
    }
};

struct Csv {
    std::string name;
    std::string text;
};

struct Output {
    VerificationReport report;
    Json result = Json::object();
    std::vector<Csv> csv;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::string& header) { out_ << header << '\n'; }

    template <typename... Ts>
    void row(const Ts&... xs)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(xs), first = false), ...);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(long double x) { return format_double(static_cast<double>(x)); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(bool b) { return b ? "1" : "0"; }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string cell(T x) { return std::to_string(x); }

    std::ostringstream out_;
};

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw BadParameters("cannot write " + p.string());
    f << text;
}

std::string utc_timestamp()
{
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_metadata(const RunConfig& cfg)
{
    Json meta = Json::object();
    meta["command"] = cfg.command;
    meta["timestamp"] = utc_timestamp();
    meta["threads"] = worker_count();
    write_file(cfg.out / "metadata.json", dump_json(meta));
}

int emit(const RunConfig& cfg, const Output& out)
{
    fs::create_directories(cfg.out);
    Json j = Json::object();
    j["config"] = cfg.to_json();
    j["passed"] = out.report.all_passed();
    j["report"] = out.report.to_json();
    j["result"] = out.result;
    write_file(cfg.out / "report.json", dump_json(j));
    for (const auto& c : out.csv)
        write_file(cfg.out / c.name, c.text);
    write_metadata(cfg);

    std::cout << cfg.command << ": " << out.report.checks().size() - out.report.failures() << "/"
              << out.report.checks().size() << " checks passed\n";
    for (const auto& c : out.report.checks())
        if (!c.passed)
            std::cout << "  FAIL " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    return out.report.all_passed() ? 0 : 1;
}

int emit_error(const RunConfig& cfg, const std::string& type, const std::string& message)
{
    Json err = Json::object();
    err["type"] = type;
    err["message"] = message;
    Json j = Json::object();
    j["config"] = cfg.to_json();
    j["passed"] = false;
    j["error"] = err;
    try {
        fs::create_directories(cfg.out);
        write_file(cfg.out / "report.json", dump_json(j));
        write_metadata(cfg);
    } catch (const std::exception&) {
    }
    std::cerr << dump_json(Json{{"error", err}});
    return 2;
}

// ---- graph ----

level_graph::GraphDescription require_graph(const RunConfig& cfg)
{
    if (cfg.input.empty())
        throw BadParameters("--in graph.json is required");
    return level_graph::load_description(cfg.input);
}

Output graph_validate(const RunConfig& cfg)
{
    const auto g = level_graph::validate_graph(require_graph(cfg));
    Output out{VerificationReport("graph validate")};
    out.report.add("trivalent level graph", true, static_cast<double>(g.vertices().size()));
    out.result["vertices"] = g.vertices().size();
    out.result["edges"] = g.edges().size();
    out.result["crossing_count"] = g.crossing_count();
    out.result["nu"] = g.nu();
    out.result["levels_all_disconnected"] = g.levels_all_disconnected();
    CsvWriter csv("id,f,in,out");
    for (const auto& v : g.vertices())
        csv.row(v.id, v.f, v.in.size(), v.out.size());
    out.csv.push_back({"vertices.csv", csv.str()});
    return out;
}

std::string endpoint_name(const level_graph::LevelGraph& g, const level_graph::Endpoint& p)
{
    using K = level_graph::Endpoint::Kind;
    if (p.kind == K::minus_infinity)
        return "-inf";
    if (p.kind == K::plus_infinity)
        return "+inf";
    return g.vertices()[p.vertex].id;
}

Output graph_weights(const RunConfig& cfg)
{
    const auto g = level_graph::validate_graph(require_graph(cfg));
    const auto w = level_graph::assign_weights(g);
    const auto u = level_graph::renormalize_levels(g);
    Output out{VerificationReport("graph weights")};
    out.report.merge(level_graph::check_level_sums(g, w), "sums");
    out.report.merge(level_graph::check_weight_bounds(g, w, u), "bounds");
    out.result = level_graph::to_json(g, w, u);
    CsvWriter csv("id,source,target,weight,weight_exact");
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edges()[e];
        csv.row(edge.id, endpoint_name(g, edge.source), endpoint_name(g, edge.target),
                static_cast<double>(to_long_double(w[e])), calibration::compact(w[e]));
    }
    out.csv.push_back({"edges.csv", csv.str()});
    return out;
}

Output graph_renormalize(const RunConfig& cfg, std::optional<int> nu)
{
    const auto g = level_graph::validate_graph(require_graph(cfg));
    const auto u = level_graph::renormalize_levels(g, nu);
    Output out{VerificationReport("graph renormalize")};
    bool monotone = true;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j)
            if (g.vertices()[i].f < g.vertices()[j].f && !(u[i] < u[j]))
                monotone = false;
    out.report.add("u increasing in f", monotone);
    const auto w = level_graph::assign_weights(g);
    out.report.merge(level_graph::check_weight_bounds(g, w, u), "bounds");
    out.result["nu"] = nu ? *nu : g.nu();
    CsvWriter csv("id,f,log16_u,log_u");
    for (std::size_t i = 0; i < u.size(); ++i)
        csv.row(g.vertices()[i].id, g.vertices()[i].f, u[i].exponent16(), u[i].log_value());
    out.csv.push_back({"levels.csv", csv.str()});
    return out;
}

Output graph_example(const std::string& name, const RunConfig& cfg)
{
    level_graph::GraphDescription d;
    if (name == "triply_punctured")
        d = level_graph::triply_punctured_sphere();
    else if (name == "two_parallel")
        d = level_graph::two_parallel_ends();
    else if (name == "random") {
        std::mt19937_64 rng(cfg.seed);
        d = level_graph::random_graph(rng);
    } else
        throw BadParameters("unknown example " + name);
    Output out{VerificationReport("graph example")};
    level_graph::validate_graph(d);
    out.report.add("valid", true);
    out.result = level_graph::to_json(d);
    fs::create_directories(cfg.out);
    write_file(cfg.out / "graph.json", dump_json(out.result));
    return out;
}

// ---- surface ----

cusp_assembly::SingularSurface surface_from(const RunConfig& cfg)
{
    const auto g = level_graph::validate_graph(require_graph(cfg));
    const auto w = level_graph::assign_weights(g);
    return cusp_assembly::assemble_surface(g, w, level_graph::renormalize_levels(g));
}

Rational horizon_of(const cusp_assembly::SingularSurface& s)
{
    Rational h = 1;
    for (const auto& p : s.singular_points())
        h = std::max(h, Rational(4 * p.u.exact()));
    return h;
}

void check_linearity(const RunConfig& cfg, const cusp_assembly::SingularSurface& s, VerificationReport& report)
{
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<long> K(1, (1L << 20) - 1);
    const Rational T = horizon_of(s);
    std::size_t bad = 0, band_bad = 0;
    Rational prev = 0;
    for (int i = 0; i < 50; ++i) {
        Rational t = T * Rational(K(rng), 1L << 20);
        t.canonicalize();
        if (s.sublevel_area(t) != t)
            ++bad;
        const Rational lo = std::min(prev, t), hi = std::max(prev, t);
        if (s.band_area(lo, hi) != hi - lo)
            ++band_bad;
        prev = t;
    }
    report.add("area(B_t) = t at 50 levels", bad == 0, static_cast<double>(bad));
    report.add("band area = t - s", band_bad == 0, static_cast<double>(band_bad));
}

Output surface_assemble(const RunConfig& cfg)
{
    const auto s = surface_from(cfg);
    Output out{VerificationReport("surface assemble")};
    check_linearity(cfg, s, out.report);
    for (const auto& p : s.singular_points())
        out.report.add("cone angle at " + p.id, std::abs(p.cone_angle - 4 * pi) < 1e-9 * 4 * pi,
                       p.cone_angle, 1e-9);
    out.result = s.to_json();
    CsvWriter csv("edge,weight,c,c_prime");
    for (const auto& p : s.pieces())
        csv.row(p.edge_id, static_cast<double>(to_long_double(p.weight)),
                p.lower.infinite ? INFINITY : static_cast<double>(p.lower.linear()),
                p.upper.infinite ? INFINITY : static_cast<double>(p.upper.linear()));
    out.csv.push_back({"pieces.csv", csv.str()});
    return out;
}

Output surface_areas(const RunConfig& cfg, std::size_t count)
{
    const auto s = surface_from(cfg);
    Output out{VerificationReport("surface areas")};
    check_linearity(cfg, s, out.report);
    const double t_max = static_cast<double>(to_long_double(horizon_of(s)));
    CsvWriter csv("t,area");
    for (const auto& [t, a] : cusp_assembly::sublevel_samples(s, t_max, count))
        csv.row(t, a);
    out.csv.push_back({"areas.csv", csv.str()});
    out.result["t_max"] = json_number(t_max);
    return out;
}

Output surface_coverage(const RunConfig& cfg)
{
    const auto s = surface_from(cfg);
    auto cov = calibration::pipe_clearing_coverage(s);
    Output out{cov.report};
    out.result = cov.to_json();
    CsvWriter gaps("lo,hi");
    for (const auto& [lo, hi] : cov.gaps)
        gaps.row(static_cast<double>(to_long_double(lo)), static_cast<double>(to_long_double(hi)));
    out.csv.push_back({"gaps.csv", gaps.str()});
    CsvWriter fam("kind,area_lo,area_hi");
    auto add = [&](const calibration::CalibratedFamily& f) {
        const auto hi = f.area_hi();
        fam.row(calibration::family_name(f.kind), static_cast<double>(to_long_double(f.area_lo())),
                hi ? static_cast<double>(to_long_double(*hi)) : INFINITY);
    };
    for (const auto& f : cov.sublevels)
        add(f);
    for (const auto& c : cov.critical)
        for (const auto& f : c.families)
            add(f);
    out.csv.push_back({"families.csv", fam.str()});
    return out;
}

// ---- rev ----

revolution::ProfileFunction profile_input(const RunConfig& cfg, const std::string& name, double v_max)
{
    if (!cfg.input.empty())
        return revolution::load_profile(cfg.input);
    return revolution::preset(name, v_max);
}

std::string profile_csv(const revolution::ProfileFunction& p, double v_end)
{
    CsvWriter csv("v,I,K");
    for (const auto& n : p.nodes()) {
        if (n.v > v_end)
            break;
        csv.row(n.v, p.value(n.v), n.v > 0 ? revolution::curvature_of_profile(p, n.v) : NAN);
    }
    return csv.str();
}

Output rev_profile(const RunConfig& cfg, const std::string& name, double v_max)
{
    const auto p = profile_input(cfg, name, v_max);
    Output out{VerificationReport("rev profile")};
    revolution::MetricOptions mo;
    mo.rtol = cfg.tol;
    const auto rt = revolution::roundtrip(p, mo);
    out.report.add("profile/metric roundtrip", rt.sup_relative_error < 1e-6, rt.sup_relative_error, 1e-6);
    out.result["profile"] = p.name();
    out.result["nondecreasing"] = p.nondecreasing();
    out.result["ratio_nonincreasing"] = p.ratio_nonincreasing();
    out.result["convex"] = p.convex();
    out.result["rtol_used"] = rt.rtol_used;
    out.csv.push_back({"profile.csv", profile_csv(p, INFINITY)});
    return out;
}

Output rev_metric(const RunConfig& cfg, const std::string& name, double v_max)
{
    const auto p = profile_input(cfg, name, v_max);
    revolution::MetricOptions mo;
    mo.rtol = cfg.tol;
    const auto s = revolution::metric_from_profile(p, mo);
    Output out{VerificationReport("rev metric")};
    // dV/dr = 2 pi f = I(V)
    double worst = 0.0;
    CsvWriter csv("r,f,area,K");
    for (const auto& n : s.nodes()) {
        if (n.area > 1e-6) {
            const double I = p.value(std::min(n.area, p.v_max()));
            worst = std::max(worst, std::abs(2 * pi * n.f - I) / I);
        }
        csv.row(n.r, n.f, n.area, s.curvature(n.r));
    }
    out.report.add("2 pi f(r) = I(V(r))", worst < 1e-6, worst, 1e-6);
    out.result["surface"] = s.to_json();
    out.csv.push_back({"metric.csv", csv.str()});
    return out;
}

void cap_checks(const revolution::ProfileFunction& p, double delta, double k, double alpha, VerificationReport& r)
{
    double flat = 0.0, floor_gap = INFINITY;
    for (int i = 0; i <= 1000; ++i) {
        const double v = delta + (alpha - delta) * i / 1000.0;
        flat = std::max(flat, std::abs(p.value(v) - v) / v);
    }
    for (int i = 1; i <= 1000; ++i) {
        const double v = delta * i / 1000.0;
        floor_gap = std::min(floor_gap, p.value(v) - revolution::bol_fiala_floor(k, v));
    }
    r.add("I(v) = v on [delta, alpha]", flat < 1e-9, flat, 1e-9);
    r.add("I >= sqrt(4 pi v - k v^2) on (0, delta]", floor_gap >= -1e-12, floor_gap, 1e-12);
    r.add("I nondecreasing", p.nondecreasing());
    r.add("I/v nonincreasing", p.ratio_nonincreasing());
}

Output rev_cap(const RunConfig& cfg, double delta, double k, double alpha)
{
    revolution::MetricOptions mo;
    mo.rtol = cfg.tol;
    const auto cap = revolution::build_cap(delta, k, alpha, mo);
    Output out{VerificationReport("rev cap")};
    cap_checks(cap.profile, delta, k, alpha, out.report);
    const double mid = std::clamp(5.0, delta, alpha);
    out.result["delta"] = delta;
    out.result["k"] = k;
    out.result["alpha"] = alpha;
    out.result["I_mid"] = {{"v", mid}, {"I", cap.profile.value(mid)}};
    out.result["knots"] = cap.design.knots;
    out.result["surface_total_area"] = cap.surface.total_area();
    out.csv.push_back({"profile.csv", profile_csv(cap.profile, alpha)});
    return out;
}

revolution::RevolutionSurface model_surface(const std::string& name, std::function<Jet(double)>& closed)
{
    if (name == "euclidean") {
        closed = [](double r) { return Jet{r, 1.0, 0.0}; };
        return revolution::euclidean_disk(5.0);
    }
    if (name == "hyperbolic") {
        closed = [](double r) { return Jet{std::sinh(r), std::cosh(r), std::sinh(r)}; };
        return revolution::hyperbolic_disk(5.0);
    }
    if (name == "exponential") {
        closed = [](double r) { return Jet{std::exp(r), std::exp(r), std::exp(r)}; };
        return revolution::exponential_end(-5.0, 5.0);
    }
    if (name.rfind("sphere:", 0) == 0) {
        const double k = std::stod(name.substr(7));
        if (!(k > 0))
            throw BadParameters("sphere curvature must be positive");
        const double s = std::sqrt(k);
        closed = [s](double r) { return Jet{std::sin(s * r) / s, std::cos(s * r), -s * std::sin(s * r)}; };
        return revolution::spherical_cap(k, 0.9 * pi / s);
    }
    throw BadParameters("unknown surface " + name);
}

Output rev_stability(const RunConfig& cfg, const std::string& name, const std::vector<double>& radii)
{
    (void)cfg;
    std::function<Jet(double)> closed;
    const auto s = model_surface(name, closed);
    Output out{VerificationReport("rev stability")};
    CsvWriter csv("r,spectral_value,margin,nearest_mode,resonant,strictly_stable");
    Json rows = Json::array();
    double worst = 0.0;
    for (double r : radii) {
        if (r <= s.r_begin() || r >= s.r_end())
            throw OutOfChart("r = " + format_double(r) + " outside the sampled surface");
        const auto sampled = revolution::stability_and_spectrum(s, r);
        const auto exact = revolution::stability_and_spectrum(closed(r));
        worst = std::max(worst, std::abs(sampled.spectral_value - exact.spectral_value) /
                                    std::max(1.0, std::abs(exact.spectral_value)));
        csv.row(r, exact.spectral_value, exact.margin, exact.nearest_mode, exact.resonant, exact.strictly_stable);
        rows.push_back({{"r", r},
                        {"spectral_value", exact.spectral_value},
                        {"margin", exact.margin},
                        {"nearest_mode", exact.nearest_mode},
                        {"resonant", exact.resonant},
                        {"sampled_spectral_value", sampled.spectral_value}});
    }
    out.report.add("sampled surface matches closed form", worst < 1e-6, worst, 1e-6);
    out.result["surface"] = name;
    out.result["points"] = rows;
    out.csv.push_back({"stability.csv", csv.str()});
    return out;
}

Output rev_merge(const RunConfig& cfg, double delta, const std::vector<double>& ks, double alpha, int m)
{
    (void)cfg;
    std::vector<revolution::ProfileFunction> caps;
    for (double k : ks)
        caps.push_back(revolution::cap_profile(delta, k, alpha).second);
    const auto ambient = revolution::preset("linear", 10 * m * alpha);
    const auto r = revolution::merge_profiles(caps, ambient, m, delta, alpha);
    Output out{VerificationReport("rev merge")};
    double below = 0.0, above = 0.0;
    CsvWriter csv("v,I,argmin");
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double v = r.grid[i];
        double lo = INFINITY;
        for (const auto& c : caps)
            lo = std::min(lo, c.value(v));
        below = std::max(below, std::abs(r.merged.value(v) - lo) / lo);
        csv.row(v, r.merged.value(v), r.minimizer.at(i));
    }
    for (int i = 1; i <= 200; ++i) {
        const double v = m * delta + (m * alpha - m * delta) * i / 200.0;
        above = std::max(above, std::abs(r.merged.value(v) - ambient.value(v)) / ambient.value(v));
    }
    out.report.add("merged = min of caps on (0, m delta]", below < 1e-9, below, 1e-9);
    out.report.add("merged = ambient on [m delta, m alpha]", above < 1e-9, above, 1e-9);
    out.result["unique_minimizer"] = r.unique_minimizer;
    out.result["dominant_cap"] = r.dominant_cap ? Json(*r.dominant_cap) : Json(nullptr);
    out.csv.push_back({"merged.csv", csv.str()});
    return out;
}

// ---- conformal ----

Output conformal_solve_cmd(const RunConfig& cfg, const std::string& name, int n, double t0, bool diagnostics)
{
    const auto p = profile_input(cfg, name, INFINITY);
    const auto sol = conformal::conformal_solve(p, n, t0);
    Output out{VerificationReport(diagnostics ? "conformal diagnostics" : "conformal solve")};
    out.report.merge(conformal::verify_solution(sol), "solution");
    if (diagnostics)
        out.report.merge(conformal::asymptotic_diagnostics(sol), "asymptotics");
    out.result = sol.to_json();
    out.csv.push_back({"solution.csv", sol.to_csv()});
    return out;
}

std::vector<double> log_grid(double lo, double hi, int count)
{
    std::vector<double> g;
    for (int i = 0; i < count; ++i)
        g.push_back(count == 1 ? lo : lo * std::pow(hi / lo, i / double(count - 1)));
    return g;
}

Output conformal_vanishing(const RunConfig& cfg, std::vector<double> volumes, std::vector<double> eps)
{
    (void)cfg;
    if (volumes.empty())
        volumes = log_grid(1.0, 100.0, 5);
    if (eps.empty())
        eps = log_grid(1e-4, 1e-1, 5);
    std::vector<conformal::VanishingTarget> targets;
    for (double v : volumes)
        for (double e : eps)
            targets.push_back({v, e});
    const auto c = conformal::vanishing_profile_construction(targets);
    Output out{c.report};
    out.result = c.to_json();
    CsvWriter csv("volume,epsilon,s,t,volume_bound,band_volume,boundary");
    for (const auto& b : c.bands)
        csv.row(b.target.volume, b.target.epsilon, b.s, b.t, b.volume_bound, b.volume, b.boundary);
    out.csv.push_back({"bands.csv", csv.str()});
    return out;
}

// ---- oracle ----

oracle::SearchTarget search_target(const std::string& name)
{
    if (name == "plane")
        return oracle::plane_target();
    if (name == "hyperbolic")
        return oracle::hyperbolic_target();
    if (name.rfind("sphere:", 0) == 0)
        return oracle::sphere_target(std::stod(name.substr(7)));
    if (name.rfind("cap:", 0) == 0) {
        double d = 0, k = 0, a = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(name.substr(4));
        if (!(in >> d >> c1 >> k >> c2 >> a) || c1 != ',' || c2 != ',')
            throw BadParameters("expected cap:delta,k,alpha");
        return oracle::surface_target(revolution::build_cap(d, k, a).surface, name);
    }
    throw BadParameters("unknown surface " + name);
}

Output oracle_search(const RunConfig& cfg, const std::string& surface, std::vector<double> areas)
{
    const auto target = search_target(surface);
    if (areas.empty())
        areas = {pi};
    oracle::SearchOptions opt;
    opt.trials = cfg.trials;
    opt.modes = cfg.modes;
    opt.seed = cfg.seed;
    Output out{VerificationReport("oracle search")};
    Json runs = Json::array();
    CsvWriter conv("area,trial,trial_minimum,best_so_far");
    CsvWriter summary("area,circle_length,best_length,relative_gap,floor_margin");
    for (std::size_t i = 0; i < areas.size(); ++i) {
        const auto r = oracle::competitor_search(target, areas[i], opt);
        out.report.merge(r.report(), "v=" + format_double(areas[i]));
        runs.push_back(r.to_json());
        for (std::size_t t = 0; t < r.trial_minima.size(); ++t)
            conv.row(areas[i], t, r.trial_minima[t], r.best_so_far[t]);
        summary.row(areas[i], r.circle_length, r.best_length, r.relative_gap, r.floor_margin);
        out.csv.push_back({"best_curve_" + std::to_string(i) + ".csv", r.best.to_csv()});
    }
    out.result["surface"] = surface;
    out.result["runs"] = runs;
    out.csv.push_back({"convergence.csv", conv.str()});
    out.csv.push_back({"summary.csv", summary.str()});
    return out;
}

Output oracle_flux(const RunConfig& cfg, std::vector<double> radii, double u_p)
{
    if (radii.empty())
        for (int i = 1; i <= 10; ++i)
            radii.push_back(std::log(2.0) * i / 10.0);
    Output out{VerificationReport("oracle flux")};
    CsvWriter csv("r,radius,flux,oracle,relative_error");
    Json rows = Json::array();
    double worst = 0.0;
    for (double r : radii) {
        const auto f = oracle::singular_flux(r, u_p);
        worst = std::max(worst, f.relative_error);
        csv.row(f.r, f.radius, f.flux, f.oracle, f.relative_error);
        rows.push_back(f.to_json());
    }
    out.report.add("flux = twice the hyperbolic area", worst < cfg.tol, worst, cfg.tol);
    out.result["points"] = rows;
    out.csv.push_back({"flux.csv", csv.str()});
    return out;
}

// ---- verify ----

Output verify(const RunConfig& cfg, const std::vector<std::string>& modules)
{
    oracle::SuiteOptions opt;
    opt.seed = cfg.seed;
    opt.modules = modules;
    Output out{oracle::property_suite(opt)};
    CsvWriter csv("name,passed,measured,tolerance");
    for (const auto& c : out.report.checks())
        csv.row(c.name, c.passed, c.measured, c.tolerance);
    out.csv.push_back({"checks.csv", csv.str()});
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"isoperimetric profiles: level graphs, cusp surfaces, surfaces of revolution"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::function<Output()> job;

    auto common = [&](CLI::App* sub, double tol_default) {
        sub->add_option("--in", cfg.input, "input file (graph or profile JSON)");
        sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber)->default_val(tol_default);
        sub->add_option("--trials", cfg.trials, "competitor trials")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--modes", cfg.modes, "Fourier modes")->check(CLI::PositiveNumber)->capture_default_str();
        return sub;
    };
    auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help, double tol_default = 1e-10) {
        return common(group->add_subcommand(name, help), tol_default);
    };

    // graph
    auto* graph = app.add_subcommand("graph", "level graphs");
    graph->require_subcommand(1);
    auto* gv = leaf(graph, "validate", "validate a graph description");
    gv->final_callback([&] { job = [&] { return graph_validate(cfg); }; });
    auto* gw = leaf(graph, "weights", "edge weights and the level/weight checks");
    gw->final_callback([&] { job = [&] { return graph_weights(cfg); }; });
    int nu = 0;
    auto* gr = leaf(graph, "renormalize", "renormalized vertex values");
    gr->add_option("--nu", nu, "exponent parameter (default: smallest admissible)")->check(CLI::PositiveNumber);
    gr->final_callback([&, gr] {
        std::optional<int> n;
        if (gr->count("--nu"))
            n = nu;
        job = [&, n] { return graph_renormalize(cfg, n); };
    });
    std::string example = "triply_punctured";
    auto* ge = leaf(graph, "example", "write a built-in graph to <out>/graph.json");
    ge->add_option("--name", example, "triply_punctured, two_parallel or random")->capture_default_str();
    ge->final_callback([&] { job = [&] { return graph_example(example, cfg); }; });

    // surface
    auto* surface = app.add_subcommand("surface", "assembled singular surfaces");
    surface->require_subcommand(1);
    auto* sa = leaf(surface, "assemble", "glue the pants pieces");
    sa->final_callback([&] { job = [&] { return surface_assemble(cfg); }; });
    std::size_t count = 200;
    auto* sr = leaf(surface, "areas", "sublevel areas");
    sr->add_option("--count", count, "samples")->capture_default_str();
    sr->final_callback([&] { job = [&] { return surface_areas(cfg, count); }; });
    auto* sc = leaf(surface, "coverage", "pipe-clearing coverage of (0, T)");
    sc->final_callback([&] { job = [&] { return surface_coverage(cfg); }; });

    // rev
    auto* rev = app.add_subcommand("rev", "surfaces of revolution");
    rev->require_subcommand(1);
    std::string preset_name = "hyperbolic";
    double v_max = 50.0;
    auto* rp = leaf(rev, "profile", "profile CSV and metric roundtrip");
    rp->add_option("--preset", preset_name, "euclidean, hyperbolic, bolfiala:k, linear, vlogv")->capture_default_str();
    rp->add_option("--vmax", v_max, "largest volume")->capture_default_str();
    rp->final_callback([&] { job = [&] { return rev_profile(cfg, preset_name, v_max); }; });
    auto* rm = leaf(rev, "metric", "metric of revolution realizing a profile");
    rm->add_option("--preset", preset_name)->capture_default_str();
    rm->add_option("--vmax", v_max)->capture_default_str();
    rm->final_callback([&] { job = [&] { return rev_metric(cfg, preset_name, v_max); }; });
    double delta = 0.1, k = 1e4, alpha = 10.0;
    auto* rc = leaf(rev, "cap", "cap with prescribed profile");
    rc->add_option("--delta", delta)->capture_default_str();
    rc->add_option("--k", k)->capture_default_str();
    rc->add_option("--alpha", alpha)->capture_default_str();
    rc->final_callback([&] { job = [&] { return rev_cap(cfg, delta, k, alpha); }; });
    std::string model = "hyperbolic";
    std::vector<double> radii = {0.5, 1.0, 2.0};
    auto* rs = leaf(rev, "stability", "spectral margin of parallel circles");
    rs->add_option("--surface", model, "euclidean, hyperbolic, exponential, sphere:k")->capture_default_str();
    rs->add_option("--r", radii, "radii")->capture_default_str();
    rs->final_callback([&] { job = [&] { return rev_stability(cfg, model, radii); }; });
    std::vector<double> ks = {1e4, 2e4};
    int copies = 2;
    auto* rg = leaf(rev, "merge", "merge cap profiles with a linear ambient profile");
    rg->add_option("--delta", delta)->capture_default_str();
    rg->add_option("--k", ks, "cap curvatures")->capture_default_str();
    rg->add_option("--alpha", alpha)->capture_default_str();
    rg->add_option("--m", copies)->check(CLI::PositiveNumber)->capture_default_str();
    rg->final_callback([&] { job = [&] { return rev_merge(cfg, delta, ks, alpha, copies); }; });

    // conformal
    auto* conf = app.add_subcommand("conformal", "conformal constructions");
    conf->require_subcommand(1);
    std::string conf_preset = "vlogv";
    int dim = 2;
    double t0 = 1.0;
    for (auto [name, diag] : {std::pair{"solve", false}, std::pair{"diagnostics", true}}) {
        auto* c = leaf(conf, name, diag ? "asymptotics of the v log v solution" : "blow-up solver");
        c->add_option("--preset", conf_preset, "linear, vlogv")->capture_default_str();
        c->add_option("--n", dim, "dimension")->check(CLI::Range(2, 16))->capture_default_str();
        c->add_option("--t0", t0, "seam level")->check(CLI::PositiveNumber)->capture_default_str();
        c->final_callback([&, diag] { job = [&, diag] { return conformal_solve_cmd(cfg, conf_preset, dim, t0, diag); }; });
    }
    std::vector<double> volumes, epsilons;
    auto* cv = leaf(conf, "vanishing", "bands of large volume and small boundary");
    cv->add_option("--volume", volumes, "target volumes (default 5 in [1, 100])");
    cv->add_option("--epsilon", epsilons, "boundary bounds (default 5 in [1e-4, 1e-1])");
    cv->final_callback([&] { job = [&] { return conformal_vanishing(cfg, volumes, epsilons); }; });

    // oracle
    auto* orc = app.add_subcommand("oracle", "numerical oracles");
    orc->require_subcommand(1);
    std::string target = "plane";
    std::vector<double> areas;
    auto* os = leaf(orc, "search", "Fourier competitor search against parallel circles");
    os->add_option("--surface", target, "plane, hyperbolic, sphere:k, cap:delta,k,alpha")->capture_default_str();
    os->add_option("--area", areas, "enclosed areas (default pi)");
    os->final_callback([&] { job = [&] { return oracle_search(cfg, target, areas); }; });
    std::vector<double> flux_r;
    double u_p = 1.0;
    auto* of = leaf(orc, "flux", "flux out of the model disk at a critical point", 1e-6);
    of->add_option("--r", flux_r, "chart radii in (0, log 2]");
    of->add_option("--up", u_p, "value at the critical point")->check(CLI::PositiveNumber)->capture_default_str();
    of->final_callback([&] { job = [&] { return oracle_flux(cfg, flux_r, u_p); }; });

    // verify
    std::vector<std::string> modules;
    auto* vf = common(app.add_subcommand("verify", "randomized property suite"), 1e-10);
    vf->add_option("--modules", modules, "subset of modules");
    vf->final_callback([&] { job = [&] { return verify(cfg, modules); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    for (const auto* sub = app.get_subcommands().front();; sub = sub->get_subcommands().front()) {
        cfg.command += (cfg.command.empty() ? "" : " ") + sub->get_name();
        if (sub->get_subcommands().empty())
            break;
    }
    if (!job)
        return emit_error(cfg, "BadParameters", "no command");

    try {
        return emit(cfg, job());
    } catch (const Error& e) {
        return emit_error(cfg, e.code(), e.what());
    } catch (const Json::exception& e) {
        return emit_error(cfg, "ParseError", e.what());
    } catch (const std::invalid_argument& e) {
        return emit_error(cfg, "BadParameters", e.what());
    }
}
