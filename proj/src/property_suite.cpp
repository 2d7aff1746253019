#include "isoprofile/calibration_engine.hpp"
#include "isoprofile/conformal_forge.hpp"
#include "isoprofile/cusp_assembly.hpp"
#include "isoprofile/errors.hpp"
#include "isoprofile/level_graph.hpp"
#include "isoprofile/oracle_bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace isoprofile::oracle {

namespace {

using namespace level_graph;
constexpr double pi = std::numbers::pi;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t module)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), module};
    return std::mt19937_64(seq);
}

// one aggregated check per invariant; the first failing sub-checks are kept in the detail
class Tally {
public:
    void take(const VerificationReport& r, const std::string& where)
    {
        for (const auto& c : r.checks())
            take(c.passed, where + ": " + c.name);
    }
    void take(bool ok, const std::string& what)
    {
        ++total_;
        if (!ok) {
            ++failed_;
            if (failures_.size() < 8)
                failures_.push_back(what);
        }
    }
    void worst(double x) { worst_ = std::max(worst_, x); }
    void emit(VerificationReport& out, const std::string& name, double tol = 0.0) const
    {
        std::string detail = std::to_string(total_) + " cases";
        for (const auto& f : failures_)
            detail += "; " + f;
        out.add(name, failed_ == 0 && total_ > 0, worst_, tol, detail);
    }

private:
    std::size_t total_ = 0, failed_ = 0;
    double worst_ = 0.0;
    std::vector<std::string> failures_;
};

cusp_assembly::SingularSurface assemble(const GraphDescription& d)
{
    auto g = validate_graph(d);
    return cusp_assembly::assemble_surface(g, assign_weights(g), renormalize_levels(g));
}

void level_graph_suite(VerificationReport& out, std::uint64_t seed, bool corrupt)
{
    auto rng = stream(seed, 1);
    Tally sums, bounds;
    std::vector<GraphDescription> graphs;
    for (int i = 0; i < 100; ++i) {
        RandomGraphOptions opt;
        opt.all_levels_disconnected = i % 2 == 0;
        graphs.push_back(random_graph(rng, opt));
    }
    Json pinpointed = Json::array();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        auto g = validate_graph(graphs[i]);
        auto w = assign_weights(g);
        if (corrupt && i == 0) {
            // lighten the first finite edge
            std::size_t e = 0;
            while (e + 1 < g.edges().size() && !g.target_value(e))
                ++e;
            w.set(e, w[e] / 3);
        }
        const auto s = check_level_sums(g, w);
        sums.take(s, "graph " + std::to_string(i));
        for (const auto& id : s.data()["pinpointed_edges"])
            pinpointed.push_back("graph " + std::to_string(i) + " edge " + id.get<std::string>());
        bounds.take(check_weight_bounds(g, w, renormalize_levels(g)), "graph " + std::to_string(i));
    }
    sums.emit(out, "level_graph/level sums equal 1");
    bounds.emit(out, "level_graph/lemma bounds");
    out.data()["pinpointed_edges"] = std::move(pinpointed);

    Tally relabel;
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& d = graphs[i];
        auto g = validate_graph(d);
        auto w = assign_weights(g);
        GraphDescription r = d;
        std::map<std::string, std::string> rename;
        for (auto& v : r.vertices)
            v.id = rename[v.id] = "x" + v.id;
        for (auto& e : r.edges) {
            if (rename.count(e.src))
                e.src = rename[e.src];
            if (rename.count(e.dst))
                e.dst = rename[e.dst];
        }
        std::reverse(r.vertices.begin(), r.vertices.end());
        std::reverse(r.edges.begin(), r.edges.end());
        auto g2 = validate_graph(r);
        auto w2 = assign_weights(g2);
        bool same = true;
        for (std::size_t e = 0; e < g2.edges().size(); ++e)
            for (std::size_t f = 0; f < g.edges().size(); ++f)
                if (g.edges()[f].id == g2.edges()[e].id)
                    same = same && w[f] == w2[e];
        relabel.take(same, "graph " + std::to_string(i));
    }
    relabel.emit(out, "level_graph/weights invariant under relabeling");
}

void cusp_suite(VerificationReport& out, std::uint64_t seed)
{
    auto rng = stream(seed, 2);
    Tally linear, floating, glue;
    std::uniform_int_distribution<long> num(1, 1000000);
    std::uniform_int_distribution<int> expo(-60, 60);
    for (int i = 0; i < 20; ++i) {
        RandomGraphOptions opt;
        opt.max_vertices = 16;
        opt.all_levels_disconnected = i % 2 == 1;
        auto d = random_graph(rng, opt);
        auto g = validate_graph(d);
        auto w = assign_weights(g);
        auto s = cusp_assembly::assemble_surface(g, w, renormalize_levels(g));
        for (int k = 0; k < 50; ++k) {
            const Rational t = Rational(num(rng), 997) * pow2(expo(rng));
            linear.take(s.sublevel_area(t) == t, "surface " + std::to_string(i));
            const long double tf = to_long_double(t);
            const double rel = static_cast<double>(std::abs((s.sublevel_area(tf) - tf) / tf));
            floating.worst(rel);
            floating.take(rel < 1e-12, "surface " + std::to_string(i));
        }
        for (const auto& p : s.singular_points()) {
            Rational sum = 0;
            bool proportional = true;
            const auto& side = p.split_side;
            for (std::size_t k = 0; k < side.edges.size(); ++k) {
                sum += side.arc_lengths[k];
                proportional = proportional && side.arc_lengths[k] == w[s.pieces()[side.edges[k]].edge] * p.u.exact();
            }
            glue.take(proportional && sum == p.single_side.length, "vertex " + p.id);
        }
    }
    linear.emit(out, "cusp_assembly/exact sublevel area = t");
    floating.emit(out, "cusp_assembly/floating sublevel area", 1e-12);
    glue.emit(out, "cusp_assembly/gluing arcs");

    Tally cone;
    for (double rho : {0.05, 0.3, 0.6}) {
        const double e = std::abs(cusp_assembly::cone_angle(rho) - 4 * pi);
        cone.worst(e);
        cone.take(e < 1e-6, "rho " + format_double(rho));
    }
    cone.emit(out, "cusp_assembly/cone angle 4 pi", 1e-6);
}

void calibration_suite(VerificationReport& out, std::uint64_t seed)
{
    auto rng = stream(seed, 3);
    std::uniform_real_distribution<double> U(0.0, 10.0);
    Tally lin;
    for (int i = 0; i < 200; ++i) {
        const double c = U(rng), d = U(rng), v = U(rng), w = U(rng);
        const double sum = calibration::calibration_lower_bound(c, v) + calibration::calibration_lower_bound(c, w);
        lin.take(std::abs(calibration::calibration_lower_bound(c, v + w) - sum) <= 1e-12 * std::max(1.0, sum) &&
                     calibration::calibration_lower_bound(std::min(c, d), v) <=
                         calibration::calibration_lower_bound(std::max(c, d), v),
                 "sample " + std::to_string(i));
    }
    lin.emit(out, "calibration_engine/lower bound linear and monotone");

    Tally chain, idem;
    for (int i = 0; i < 20; ++i) {
        RandomGraphOptions opt;
        opt.all_levels_disconnected = true;
        opt.max_vertices = 16;
        auto s = assemble(random_graph(rng, opt));
        auto r = calibration::pipe_clearing_coverage(s);
        for (const auto& cc : r.critical)
            chain.take((!cc.chain || cc.chain->exact >= cc.chain->final) && cc.covered, "graph " + std::to_string(i) + " at " + cc.id);
        chain.take(r.covered, "graph " + std::to_string(i) + " coverage");
        idem.take(dump_json(calibration::pipe_clearing_coverage(s).to_json()) == dump_json(r.to_json()),
                  "graph " + std::to_string(i));
    }
    chain.emit(out, "calibration_engine/C above D at every critical value");
    idem.emit(out, "calibration_engine/coverage idempotent");
}

void revolution_suite(VerificationReport& out, std::uint64_t seed)
{
    using namespace revolution;
    auto rng = stream(seed, 4);

    Tally rt;
    for (const char* name : {"euclidean", "hyperbolic", "bolfiala:1"}) {
        const double e = roundtrip(preset(name, 20.0)).sup_relative_error;
        rt.worst(e);
        rt.take(e < 1e-6, name);
    }
    rt.emit(out, "revolution_lab/profile roundtrip", 1e-6);

    Tally curv;
    const std::vector<std::pair<std::string, RevolutionSurface>> surfaces = {
        {"hyperbolic", hyperbolic_disk(2.5)}, {"sphere k=2", spherical_cap(2.0, 1.5)}, {"plane", euclidean_disk(2.0)}};
    for (const auto& [name, s] : surfaces) {
        const auto p = profile_from_metric(s);
        for (double frac : {0.15, 0.4, 0.8}) {
            const double r = frac * s.r_end();
            // -(I^2)''/2 by central differences in v
            const double v = s.area(r), h = 1e-3 * v;
            const double i2p = p.i2(v + h).value, i20 = p.i2(v).value, i2m = p.i2(v - h).value;
            const double k = -0.5 * (i2p - 2 * i20 + i2m) / (h * h);
            const double e = std::abs(k - s.curvature(r));
            curv.worst(e);
            curv.take(e < 1e-4, name + " r=" + format_double(r));
        }
    }
    curv.emit(out, "revolution_lab/curvature identity", 1e-4);

    Tally var;
    std::uniform_real_distribution<double> amp(-0.05, 0.05), ang(0.0, 2 * pi);
    const std::vector<std::pair<std::string, RadialMetric>> metrics = {
        {"plane", euclidean_metric()}, {"hyperbolic", hyperbolic_metric()}, {"sphere", spherical_metric(1.0)}};
    for (const auto& [name, m] : metrics)
        for (int i = 0; i < 3; ++i) {
            FourierCurve c;
            c.r0 = 0.8;
            c.a = {amp(rng), amp(rng), amp(rng)};
            c.b = {amp(rng), amp(rng), amp(rng)};
            const double th = ang(rng);
            const double k = geodesic_curvature(m, c, th);
            const double e = std::abs(curvature_by_variation(m, c, th) - k) / std::abs(k);
            var.worst(e);
            var.take(e < 1e-5, name + " curve " + std::to_string(i));
        }
    var.emit(out, "revolution_lab/geodesic curvature = first variation", 1e-5);

    Tally cap;
    for (double k : {0.5, 2.0, 4.0}) {
        const auto s = spherical_cap(k, 0.9 * pi / std::sqrt(k));
        for (double frac : {0.2, 0.5, 0.9}) {
            const double r = frac * s.r_end();
            const double e = std::abs(2 * pi * s.f(r).value - bol_fiala(k, s.area(r))) / bol_fiala(k, s.area(r));
            cap.worst(e);
            cap.take(e < 1e-10, "k=" + format_double(k));
        }
    }
    cap.emit(out, "revolution_lab/sphere cap profile = J_k", 1e-10);

    Tally sub;
    std::vector<double> grid;
    for (int i = 1; i <= 400; ++i)
        grid.push_back(2.0 * i / 400.0);
    const std::vector<std::pair<std::string, ScalarProfile>> candidates = {
        {"sqrt", [](double v) { return std::sqrt(v); }},
        {"J_1", [](double v) { return bol_fiala_floor(1.0, v); }},
        {"min(J_1, J_2)", min_of([](double v) { return bol_fiala_floor(1.0, v); },
                                 [](double v) { return bol_fiala_floor(2.0, v); })}};
    for (const auto& [name, F] : candidates) {
        const auto shape = shape_predicates(F, grid);
        if (!shape.subadditive_certificate)
            continue;
        const double d = max_subadditivity_defect(F, 2.0, 10000, rng);
        sub.worst(d);
        sub.take(d <= 1e-12, name);
    }
    sub.emit(out, "revolution_lab/subadditivity on 10^4 pairs", 1e-12);
}

void conformal_suite(VerificationReport& out, std::uint64_t seed)
{
    auto rng = stream(seed, 5);
    Tally solve;
    for (const char* name : {"linear", "vlogv"})
        solve.take(conformal::verify_solution(conformal::conformal_solve(revolution::preset(name))), name);
    solve.emit(out, "conformal_forge/solution invariants");

    std::uniform_real_distribution<double> lv(0.0, 2.0), le(-4.0, -1.0);
    std::vector<conformal::VanishingTarget> targets;
    for (int i = 0; i < 25; ++i)
        targets.push_back({std::pow(10.0, lv(rng)), std::pow(10.0, le(rng))});
    Tally bands;
    const auto c = conformal::vanishing_profile_construction(targets);
    for (std::size_t i = 0; i < c.bands.size(); ++i) {
        const auto& b = c.bands[i];
        bands.take(b.volume_bound >= b.target.volume * (1 - 1e-12) && b.volume >= b.volume_bound * (1 - 1e-12) &&
                       b.boundary <= b.target.epsilon, "band " + std::to_string(i));
    }
    bands.emit(out, "conformal_forge/vanishing bands");
}

void oracle_suite(VerificationReport& out, std::uint64_t seed)
{
    SearchOptions opt;
    opt.seed = seed;
    opt.trials = 12;
    opt.modes = 4;
    opt.hessian = false;
    Tally floor, mono, proj;
    for (const auto& [t, v] : std::vector<std::pair<SearchTarget, double>>{
             {plane_target(), pi}, {hyperbolic_target(), 2 * pi * (std::cosh(1.0) - 1.0)}, {sphere_target(1.0), 2.0}}) {
        const auto r = competitor_search(t, v, opt);
        floor.worst(std::max(0.0, -r.floor_margin));
        floor.take(r.floor_margin >= -1e-6 && !r.beats_circle, t.name);
        proj.worst(r.worst_area_error);
        proj.take(r.worst_area_error < 1e-10, t.name);
        SearchOptions fewer = opt;
        fewer.trials = 6;
        const auto s = competitor_search(t, v, fewer);
        mono.take(r.best_length <= s.best_length, t.name);
    }
    floor.emit(out, "oracle_bench/Bol-Fiala floor and circle optimality", 1e-6);
    mono.emit(out, "oracle_bench/more trials never raise the minimum");
    proj.emit(out, "oracle_bench/area after projection", 1e-10);

    Tally flux;
    for (double r : {0.05, 0.2, 0.5, std::log(2.0)}) {
        const auto f = singular_flux(r);
        flux.worst(f.relative_error);
        flux.take(f.flux > 0 && f.relative_error < 1e-6, "r=" + format_double(r));
    }
    flux.emit(out, "oracle_bench/singular flux", 1e-6);
}

}  // namespace

const std::vector<std::string>& suite_modules()
{
    static const std::vector<std::string> names = {"level_graph",       "cusp_assembly",   "calibration_engine",
                                                   "revolution_lab",    "conformal_forge", "oracle_bench"};
    return names;
}

VerificationReport property_suite(const SuiteOptions& opt)
{
    for (const auto& m : opt.modules)
        if (std::find(suite_modules().begin(), suite_modules().end(), m) == suite_modules().end())
            throw BadParameters("unknown module '" + m + "'");
    auto wanted = [&](const std::string& m) {
        return opt.modules.empty() || std::find(opt.modules.begin(), opt.modules.end(), m) != opt.modules.end();
    };
    VerificationReport out("property suite");
    out.data()["seed"] = opt.seed;
    if (wanted("level_graph"))
        level_graph_suite(out, opt.seed, opt.corrupt_weight);
    if (wanted("cusp_assembly"))
        cusp_suite(out, opt.seed);
    if (wanted("calibration_engine"))
        calibration_suite(out, opt.seed);
    if (wanted("revolution_lab"))
        revolution_suite(out, opt.seed);
    if (wanted("conformal_forge"))
        conformal_suite(out, opt.seed);
    if (wanted("oracle_bench"))
        oracle_suite(out, opt.seed);
    return out;
}

}  // namespace isoprofile::oracle
