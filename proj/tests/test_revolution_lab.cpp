#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <cmath>
#include <numbers>

using namespace isoprofile;
using namespace isoprofile::revolution;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("surface areas")
{
    auto s = hyperbolic_disk(3.0);
    CHECK(s.area(1.0) == doctest::Approx(2 * pi * (std::cosh(1.0) - 1)).epsilon(1e-13));
    CHECK(s.radius_for_area(2 * pi * (std::cosh(2.0) - 1)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.curvature(1.3) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(s.curvature(0.0) == doctest::Approx(-1.0).epsilon(1e-6));
    auto e = exponential_end(-3.0, 2.0);
    CHECK(e.area(1.0) == doctest::Approx(2 * pi * std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("profile_from_metric closed forms")
{
    SUBCASE("euclidean")
    {
        auto p = profile_from_metric(euclidean_disk(3.0));
        for (const auto& n : p.nodes())
            CHECK(std::sqrt(n.i2) == doctest::Approx(std::sqrt(4 * pi * n.v)).epsilon(1e-10));
    }
    SUBCASE("hyperbolic")
    {
        auto p = profile_from_metric(hyperbolic_disk(3.0));
        for (std::size_t i = 1; i < p.nodes().size(); i += 37) {
            const auto& n = p.nodes()[i];
            CHECK(std::sqrt(n.i2) == doctest::Approx(std::sqrt(n.v * n.v + 4 * pi * n.v)).epsilon(1e-10));
        }
    }
    SUBCASE("spherical")
    {
        const double k = 2.0;
        auto p = profile_from_metric(spherical_cap(k, 1.5));
        for (std::size_t i = 1; i < p.nodes().size(); i += 37) {
            const auto& n = p.nodes()[i];
            CHECK(std::sqrt(n.i2) == doctest::Approx(bol_fiala(k, n.v)).epsilon(1e-10));
        }
        CHECK(p.nodes().front().d2 == doctest::Approx(-2 * k).epsilon(1e-5));
    }
    SUBCASE("non-positive f")
    {
        std::vector<RadialNode> nodes{{0.0, 1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.0, 0.0, 0.0}};
        CHECK_THROWS_AS(profile_from_metric(RevolutionSurface::from_nodes(nodes)), NonPositiveProfile);
    }
}

TEST_CASE("metric_from_profile")
{
    SUBCASE("flat")
    {
        auto s = metric_from_profile(preset("euclidean", 30.0));
        for (double r = 0.1; r < 3.0; r += 0.1)
            CHECK(std::abs(s.f(r).value - r) < 1e-8);
    }
    SUBCASE("hyperbolic")
    {
        auto s = metric_from_profile(preset("hyperbolic", 2 * pi * (std::cosh(3.2) - 1)));
        for (double r = 0.05; r <= 3.0; r += 0.05)
            CHECK(std::abs(s.f(r).value - std::sinh(r)) < 1e-6 * std::sinh(r));
    }
    SUBCASE("bad origin")
    {
        CHECK_THROWS_AS(metric_from_profile(preset("linear")), BadOrigin);
    }
}

TEST_CASE("roundtrips")
{
    for (const char* name : {"euclidean", "hyperbolic", "bolfiala:1"}) {
        auto rt = roundtrip(preset(name, 20.0));
        INFO(name);
        CHECK(rt.sup_relative_error < 1e-6);
    }
}

TEST_CASE("curvature of profiles")
{
    auto bf = preset("bolfiala:3", 3.0);
    for (double v : {0.0, 0.1, 1.0, 2.5})
        CHECK(curvature_of_profile(bf, v) == doctest::Approx(3.0).epsilon(1e-6));
    auto lin = preset("linear", 100.0);
    for (double v : {0.5, 10.0, 90.0})
        CHECK(curvature_of_profile(lin, v) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("curvature identity on surfaces")
{
    auto s = hyperbolic_disk(2.5);
    auto p = profile_from_metric(s);
    for (double r : {0.3, 1.0, 2.0}) {
        const double v = s.area(r);
        CHECK(std::abs(curvature_of_profile(p, v) - s.curvature(r)) < 1e-4);
    }
}

TEST_CASE("geodesic curvature of circles")
{
    FourierCurve c;
    c.r0 = 1.7;
    CHECK(geodesic_curvature(euclidean_metric(), c, 0.3) == doctest::Approx(1 / 1.7));
    CHECK(geodesic_curvature(hyperbolic_metric(), c, 0.3) == doctest::Approx(1 / std::tanh(1.7)));
    auto m = measure_curve(euclidean_metric(), c);
    CHECK(m.length == doctest::Approx(2 * pi * 1.7));
    CHECK(m.area == doctest::Approx(pi * 1.7 * 1.7));
}

TEST_CASE("stability and spectrum")
{
    const double r = 0.8;
    auto er = stability_and_spectrum(Jet{std::exp(r), std::exp(r), std::exp(r)});
    CHECK(er.spectral_value == doctest::Approx(0.0));
    CHECK(er.margin == doctest::Approx(1.0));
    CHECK(er.strictly_stable);
    CHECK_FALSE(er.resonant);

    auto sh = stability_and_spectrum(hyperbolic_disk(2.0), 1.0);
    CHECK(std::abs(sh.margin) < 1e-9);
    CHECK(sh.resonant);
    CHECK(sh.nearest_mode == 1);
    CHECK_FALSE(sh.strictly_stable);

    auto fl = stability_and_spectrum(euclidean_disk(2.0), 1.0);
    CHECK(fl.margin < 1e-12);
    CHECK(fl.resonant);

    auto four = stability_and_spectrum(Jet{1.0, 2.0, 0.0});
    CHECK(four.nearest_mode == 2);
}

TEST_CASE("cap construction")
{
    SUBCASE("bad ordering")
    {
        CHECK_THROWS_AS(cap_profile(10.0, 100.0, 1.0), BadParameters);
    }
    SUBCASE("k too small")
    {
        try {
            cap_profile(0.1, 1.0, 10.0);
            FAIL("expected a constraint violation");
        } catch (const ConstraintViolation& e) {
            CHECK(std::string(e.what()).find("sqrt(4 pi v - k v^2)") != std::string::npos);
        }
        CHECK_THROWS_AS(cap_profile(0.1, 100.0, 10.0), ConstraintViolation);
        CHECK_THROWS_AS(cap_profile(0.1, 1000.0, 10.0), ConstraintViolation);
    }
    SUBCASE("feasible cap")
    {
        auto [design, p] = cap_profile(0.1, 1e4, 10.0);
        const Jet o = p.i2(0.0);
        CHECK(o.value == 0.0);
        CHECK(o.d1 == doctest::Approx(4 * pi));
        CHECK(o.d2 == doctest::Approx(-2e4));
        CHECK(curvature_of_profile(p, 0.0) == doctest::Approx(1e4).epsilon(1e-8));
        CHECK(p.value(5.0) == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(p.nondecreasing());
        CHECK(p.ratio_nonincreasing());
        // C2 seam at delta
        const Jet below = p.i2(0.1 * (1 - 1e-12)), above = p.i2(0.1);
        CHECK(below.value == doctest::Approx(above.value).epsilon(1e-9));
        CHECK(below.d1 == doctest::Approx(above.d1).epsilon(1e-8));
        CHECK(below.d2 == doctest::Approx(above.d2).epsilon(1e-6));
        for (double v = 1e-4; v < 0.1; v += 1e-4) {
            const double lb = 4 * pi * v - 1e4 * v * v;
            if (lb > 0)
                CHECK(p.value(v) >= std::sqrt(lb) * (1 - 1e-12));
        }
    }
    SUBCASE("cap metric has exponential growth where I(v) = v")
    {
        auto cap = build_cap(0.1, 1e4, 10.0);
        const auto& s = cap.surface;
        const double r1 = s.radius_for_area(0.2), r2 = s.radius_for_area(10.0);
        for (int i = 0; i <= 20; ++i) {
            const double r = r1 + (r2 - r1) * i / 20.0;
            const Jet f = s.f(r);
            CHECK(std::abs(f.d1 / f.value - 1.0) < 1e-6);
        }
        auto back = profile_from_metric(s);
        CHECK(std::sqrt(back.i2(5.0).value) == doctest::Approx(5.0).epsilon(1e-6));
    }
}

TEST_CASE("merging caps")
{
    auto cap1 = cap_profile(0.1, 1e4, 10.0).second;
    auto cap2 = cap_profile(0.1, 2e4, 10.0).second;
    auto lin = preset("linear", 100.0);
    SUBCASE("identical caps")
    {
        auto r = merge_profiles({cap1, cap1}, lin, 2, 0.1, 10.0);
        CHECK_FALSE(r.unique_minimizer);
        for (double v : {0.01, 0.05, 0.15})
            CHECK(r.merged.value(v) == doctest::Approx(cap1.value(v)));
        CHECK(r.merged.value(7.0) == doctest::Approx(7.0));
    }
    SUBCASE("dominant cap")
    {
        // the more curved cap sits below near the pole
        bool below = true;
        for (double v = 1e-4; v < 0.1; v += 1e-4)
            below = below && cap2.value(v) <= cap1.value(v) * (1 + 1e-14);
        REQUIRE(below);
        auto r = merge_profiles({cap1, cap2}, lin, 2, 0.1, 10.0);
        CHECK(r.unique_minimizer);
        REQUIRE(r.dominant_cap.has_value());
        CHECK(*r.dominant_cap == 1);
        for (auto j : r.minimizer)
            CHECK(j == 1);
    }
    SUBCASE("corrupted cap")
    {
        auto bad = ProfileFunction::from_closed_form(
            [](double v) {
                // dips after v = 0.5 while I/v keeps falling
                const double i = v < 0.5 ? v : std::max(1.0 - v, 0.3);
                return Jet{i * i, 0.0, 0.0};
            },
            1e9, 20.0, "bad");
        try {
            merge_profiles({bad, cap1}, lin, 2, 0.1, 10.0);
            FAIL("expected a hypothesis failure");
        } catch (const HypothesisFailure& e) {
            CHECK(std::string(e.what()).find("I_S nondecreasing") == 0);
        }
    }
}

TEST_CASE("shape predicates")
{
    std::vector<double> grid;
    for (int i = 1; i <= 400; ++i)
        grid.push_back(0.025 * i);
    auto sq = shape_predicates([](double v) { return std::sqrt(v); }, grid);
    CHECK(sq.ratio_nonincreasing);
    CHECK(sq.subadditive_certificate);
    CHECK(std::sqrt(2.0) <= 2.0);

    auto conv = shape_predicates([](double v) { return v * v; }, grid);
    CHECK_FALSE(conv.subadditive_certificate);
    REQUIRE(conv.counterexample.has_value());
    CHECK((*conv.counterexample)[0] == 1.0);
    CHECK((*conv.counterexample)[2] == 4.0);
    CHECK((*conv.counterexample)[3] == 2.0);

    auto j1 = [](double v) { return bol_fiala_floor(1.0, v); };
    auto j2 = [](double v) { return bol_fiala_floor(2.0, v); };
    std::vector<double> small;
    for (int i = 1; i <= 400; ++i)
        small.push_back(2.0 * pi / 2.0 * i / 400.0);
    auto mn = min_of(j1, j2);
    CHECK(shape_predicates(mn, small).subadditive_certificate);
    auto sp = splice([](double v) { return std::sqrt(v); }, [](double v) { return std::sqrt(v) * 0.9 + 0.1 * std::sqrt(0.5); }, 0.5);
    CHECK(shape_predicates(sp, grid).subadditive_certificate);

    std::mt19937_64 rng(3);
    CHECK(max_subadditivity_defect(mn, 2.0 * pi / 2.0, 10000, rng) <= 1e-12);
}

TEST_CASE("Bol-Fiala constants")
{
    CHECK(bol_fiala(-1.0, 1.0) == doctest::Approx(3.6832554370229602).epsilon(1e-14));
    CHECK(bol_fiala(5.0, 0.0) == 0.0);
    CHECK(bol_fiala(-3.0, 0.0) == 0.0);
    CHECK_THROWS_AS(bol_fiala(1.0, 20.0), DomainError);
    CHECK(ultrahyperbolic_rho(2 * pi, 1.0) == doctest::Approx(-27.750049636362225).epsilon(1e-13));
    CHECK(small_volume_threshold(2.0) == doctest::Approx(pi));
    // sphere cap profile equals J_k
    const double k = 4.0;
    auto s = spherical_cap(k, 1.0);
    for (double r : {0.2, 0.6, 1.0})
        CHECK(2 * pi * s.f(r).value == doctest::Approx(bol_fiala(k, s.area(r))).epsilon(1e-12));
}

TEST_CASE("profile file parsing")
{
    Json j = Json::object();
    Json grid = Json::array();
    for (int i = 0; i <= 200; ++i) {
        const double v = 0.05 * i;
        grid.push_back({{"v", v}, {"I2", v * v + 4 * pi * v}});
    }
    j["grid"] = grid;
    j["anchors"] = {{"d1", 4 * pi}, {"d2", 2.0}};
    auto p = parse_profile(j);
    CHECK(p.value(3.3) == doctest::Approx(std::sqrt(3.3 * 3.3 + 4 * pi * 3.3)).epsilon(1e-9));
    CHECK(p.convex() == false);
    CHECK(p.nondecreasing());
    CHECK_THROWS_AS(parse_profile(Json::parse(R"({"grid":[{"v":0}]})")), ParseError);
    CHECK(parse_profile(Json("hyperbolic")).name() == "hyperbolic");
}

TEST_CASE("vlogv preset")
{
    auto p = preset("vlogv", 100.0);
    CHECK(p.value(0.5) == doctest::Approx(0.5));
    CHECK(p.value(10.0) == doctest::Approx(10 * std::log(10.0)));
    CHECK(p.value(1e200) == doctest::Approx(1e200 * std::log(1e200)));
    CHECK(p.convex());
    // C2 at the blend ends
    for (double x : {1.0, 5.0}) {
        const Jet a = p.i2(x * (1 - 1e-10)), b = p.i2(x * (1 + 1e-10));
        CHECK(a.d2 == doctest::Approx(b.d2).epsilon(1e-6));
    }
}
