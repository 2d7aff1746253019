#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoprofile/calibration_engine.hpp"
#include "isoprofile/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace isoprofile;
using namespace isoprofile::calibration;
using namespace isoprofile::level_graph;
using isoprofile::cusp_assembly::SingularSurface;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SingularSurface build(const GraphDescription& d, const Weighting* override_w = nullptr)
{
    auto g = validate_graph(d);
    return cusp_assembly::assemble_surface(g, override_w ? *override_w : assign_weights(g), renormalize_levels(g));
}

// b merges two ends at 0; the through edge C splits at d (value 2)
GraphDescription merge_then_split()
{
    GraphDescription d;
    d.vertices = {{"b", 0}, {"a", 1}, {"d", 2}};
    d.edges = {{"L", "-inf", "b"},  {"R", "-inf", "b"},  {"A", "b", "a"},   {"A1", "a", "+inf"},
               {"A2", "a", "+inf"}, {"C", "-inf", "d"},  {"D1", "d", "+inf"}, {"D2", "d", "+inf"}};
    return d;
}

std::size_t edge_index(const LevelGraph& g, const std::string& id)
{
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].id == id)
            return e;
    throw std::runtime_error("no edge " + id);
}

bool check_named(const VerificationReport& r, const std::string& name)
{
    for (const auto& c : r.checks())
        if (c.name == name)
            return c.passed;
    FAIL("missing check " << name);
    return false;
}

}  // namespace

TEST_CASE("calibration lower bound")
{
    CHECK(cusp_profile(2, 5.0) == 5.0);
    CHECK(calibration_lower_bound(1.0, 5.0) == 5.0);
    CHECK(ball_lower_bound(2, 1.0, 2.0) == 2.0);
    for (double v : {0.0, 0.5, 3.0, 1e6})
        CHECK(calibration_lower_bound(0.0, v) == 0.0);

    auto eq = calibration_lower_bound(1.0, 5.0, 5.0);
    CHECK(eq.equality);
    CHECK_FALSE(calibration_lower_bound(1.0, 5.0, 5.1).equality);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double c = U(rng), d = U(rng), v = U(rng), w = U(rng);
        CHECK(calibration_lower_bound(c, v + w) == doctest::Approx(calibration_lower_bound(c, v) +
                                                                   calibration_lower_bound(c, w)));
        CHECK(calibration_lower_bound(std::min(c, d), v) <= calibration_lower_bound(std::max(c, d), v));
    }
}

TEST_CASE("rearrangement bound")
{
    SUBCASE("f = cosh, u = tanh")
    {
        auto s = revolution::RevolutionSurface::from_function(
            [](double r) { return Jet{std::cosh(r), std::sinh(r), std::cosh(r)}; }, 0.0, 2.0);
        auto r = rearrangement_bound(s, [](double r) { return std::tanh(r); }, 1.0);
        CHECK(r.sandwich);
        CHECK(r.integral == doctest::Approx(two_pi * (std::cosh(1.0) - 1.0)).epsilon(1e-8));
        CHECK(std::abs(r.integral - 3.41227626528490) < 1e-8);
        // the inner circle is boundary too, so omega does not calibrate all of it
        CHECK_FALSE(r.equality);
        auto same = rearrangement_bound(s, log_derivative_density(s), 1.0);
        CHECK(same.integral == doctest::Approx(r.integral).epsilon(1e-10));
    }
    SUBCASE("exponential end: u = f'/f = 1")
    {
        auto s = revolution::exponential_end(-6.0, 3.0);
        auto r = rearrangement_bound(s, log_derivative_density(s), 1.0);
        CHECK(r.sandwich);
        CHECK(r.equality);
        CHECK(r.area == doctest::Approx(two_pi * std::exp(1.0)).epsilon(1e-10));
        CHECK(r.integral == doctest::Approx(r.area).epsilon(1e-9));
        CHECK(r.boundary_length == doctest::Approx(r.area).epsilon(1e-10));
    }
    SUBCASE("constant density reduces to the calibration bound")
    {
        auto s = revolution::hyperbolic_disk(2.0);
        auto r = rearrangement_bound(s, [](double) { return 1.0; }, 1.5);
        CHECK(r.integral == doctest::Approx(calibration_lower_bound(1.0, r.area)).epsilon(1e-10));
        CHECK(r.area == doctest::Approx(two_pi * (std::cosh(1.5) - 1.0)).epsilon(1e-10));
    }
    SUBCASE("decreasing density is not a sublevel")
    {
        auto s = revolution::hyperbolic_disk(2.0);
        CHECK_THROWS_AS(rearrangement_bound(s, log_derivative_density(s), 1.0), NotSublevel);
        CHECK_THROWS_AS(rearrangement_bound(s, [](double r) { return std::sin(4 * r); }, 1.0), NotSublevel);
    }
}

TEST_CASE("inequality chain arithmetic")
{
    // tight case: w = 1/2, c = 1, c'' = 16
    auto t = inequality_chain(Rational(1, 2), Rational(1), Rational(1, 16), Rational(16));
    REQUIRE(t.has_value());
    CHECK(t->final == 0);
    CHECK(t->relaxed == Rational(3, 2));
    CHECK(t->annulus == Rational(39, 16));
    CHECK(t->exact >= t->annulus);
    CHECK(t->exact == Rational(51, 16));
    CHECK_FALSE(inequality_chain(Rational(1, 2), Rational(1), Rational(0), std::nullopt).has_value());
    // below the lemma bound the chain goes negative
    auto bad = inequality_chain(Rational(1, 4), Rational(1), Rational(1, 16), Rational(16));
    CHECK(bad->final < 0);
}

TEST_CASE("interval union")
{
    using R = Rational;
    CHECK(uncovered({}, R(0), R(4)) == std::vector<Interval>{{R(0), R(4)}});
    CHECK(uncovered({{R(0), R(1)}, {R(1), R(4)}}, R(0), R(4)).empty());
    auto g = uncovered({{R(2), R(3)}, {R(0), R(1)}, {R(1, 2), R(3, 2)}}, R(0), R(4));
    REQUIRE(g.size() == 2);
    CHECK(g[0] == Interval{R(3, 2), R(2)});
    CHECK(g[1] == Interval{R(3), R(4)});
}

TEST_CASE("triply punctured sphere has a gap at the critical area")
{
    auto s = build(triply_punctured_sphere());
    auto r = pipe_clearing_coverage(s);
    CHECK_FALSE(r.covered);
    REQUIRE(r.critical.size() == 1);
    CHECK_FALSE(r.critical[0].spare_piece.has_value());
    // u(p) = 256 and the sublevel areas equal the level
    REQUIRE(r.gaps.size() == 1);
    CHECK(r.gaps[0] == Interval{Rational(128), Rational(512)});
    CHECK(r.critical[0].gaps == r.gaps);
    CHECK(r.horizon == 1024);
    CHECK_FALSE(r.report.all_passed());
    CHECK_THROWS_AS(require_pipe_clearing(s), NoSpareComponent);
}

TEST_CASE("merge then split is fully covered")
{
    auto d = merge_then_split();
    auto g = validate_graph(d);
    REQUIRE(g.levels_all_disconnected());
    auto s = build(d);
    auto r = require_pipe_clearing(s);
    CHECK(r.covered);
    CHECK(r.report.all_passed());
    REQUIRE(r.critical.size() == 3);
    for (const auto& cc : r.critical) {
        CHECK(cc.covered);
        REQUIRE(cc.families.size() == 2);
        for (const auto& f : cc.families)
            CHECK(f.a1 > 0);
    }
    // at b the spare edge is C, which ends at d: the chain is finite and nonnegative
    const auto& at_b = r.critical[0];
    CHECK(at_b.id == "b");
    CHECK(s.pieces()[*at_b.spare_piece].edge_id == "C");
    REQUIRE(at_b.chain.has_value());
    CHECK(at_b.chain->final > 0);
    // above a only anticusp edges cross
    CHECK(s.pieces()[*r.critical[2].spare_piece].upper.infinite);

    SUBCASE("idempotent")
    {
        auto again = pipe_clearing_coverage(s);
        CHECK(dump_json(again.to_json()) == dump_json(r.to_json()));
    }
    SUBCASE("horizons")
    {
        for (const Rational& t : {Rational(1, 1000), Rational(3), Rational(300), pow16(30), pow16(200)})
            CHECK(pipe_clearing_coverage(s, t).covered);
    }
}

TEST_CASE("an injected light weight opens a gap")
{
    auto d = merge_then_split();
    auto g = validate_graph(d);
    auto w = assign_weights(g);
    // lighten C together with its children so the circles at d still glue
    w.set(edge_index(g, "C"), pow16(-8));
    w.set(edge_index(g, "D1"), pow16(-8) / 2);
    w.set(edge_index(g, "D2"), pow16(-8) / 2);
    auto s = build(d, &w);
    auto r = pipe_clearing_coverage(s);
    const auto& at_b = r.critical[0];
    REQUIRE(at_b.chain.has_value());
    CHECK(at_b.chain->exact < 0);
    CHECK_FALSE(at_b.covered);
    CHECK_FALSE(check_named(r.report, "critical b chain nonnegative"));
    CHECK_FALSE(r.covered);
}

TEST_CASE("random disconnected graphs are covered")
{
    std::mt19937_64 rng(99);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        RandomGraphOptions opt;
        opt.all_levels_disconnected = true;
        opt.max_vertices = 16;
        auto d = random_graph(rng, opt);
        auto s = build(d);
        auto r = pipe_clearing_coverage(s);
        CHECK(r.covered);
        CHECK(r.report.all_passed());
        for (const auto& cc : r.critical)
            if (cc.chain) {
                CHECK(cc.chain->exact >= cc.chain->annulus);
                CHECK(cc.chain->annulus >= cc.chain->relaxed);
                CHECK(cc.chain->relaxed >= cc.chain->final);
                CHECK(cc.chain->final >= 0);
            }
        for (const Rational& t : {Rational(1, 7), Rational(5), Rational(r.horizon * 3)})
            CHECK(pipe_clearing_coverage(s, t).covered);
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("connected critical levels leave gaps")
{
    std::mt19937_64 rng(5);
    int with_gap = 0;
    for (int trial = 0; trial < 40; ++trial) {
        RandomGraphOptions opt;
        opt.all_levels_disconnected = false;
        opt.max_vertices = 12;
        auto d = random_graph(rng, opt);
        auto g = validate_graph(d);
        auto r = pipe_clearing_coverage(build(d));
        bool connected_level = false;
        for (const auto& cc : r.critical)
            connected_level = connected_level || !cc.spare_piece;
        // a gap appears exactly when some critical level has no spare component
        CHECK(r.covered == !connected_level);
        with_gap += connected_level;
        if (g.levels_all_disconnected())
            CHECK_FALSE(connected_level);
    }
    MESSAGE(with_gap << " of 40 graphs had a connected critical level");
}
