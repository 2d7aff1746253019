#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoprofile/errors.hpp"
#include "isoprofile/level_graph.hpp"

#include <algorithm>
#include <map>

using namespace isoprofile;
using namespace isoprofile::level_graph;

namespace {

// weight of the edge with a given id
Rational weight_of(const LevelGraph& g, const Weighting& w, const std::string& id)
{
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].id == id)
            return w[e];
    FAIL("no edge " << id);
    return 0;
}

// split of one of two ends at value 1; a and the through edge C cross level 1/2
GraphDescription split_graph()
{
    GraphDescription d;
    d.vertices = {{"b", 0}, {"a", 1}};
    d.edges = {{"L", "-inf", "b"}, {"R", "-inf", "b"}, {"A", "b", "a"},
               {"A1", "a", "+inf"}, {"A2", "a", "+inf"}, {"C", "-inf", "+inf"}};
    return d;
}

}  // namespace

TEST_CASE("vertex-free graph")
{
    auto g = validate_graph(two_parallel_ends());
    CHECK(g.crossing_count() == 2);
    CHECK(g.levels_all_disconnected());
    auto w = assign_weights(g);
    CHECK(w[0] == Rational(1, 2));
    CHECK(w[1] == Rational(1, 2));
    CHECK(check_level_sums(g, w).all_passed());
}

TEST_CASE("triply punctured sphere")
{
    auto g = validate_graph(triply_punctured_sphere());
    CHECK(g.crossing_count() == 1);
    CHECK_FALSE(g.levels_all_disconnected());
    CHECK(g.nu() == 1);
    auto w = assign_weights(g);
    CHECK(weight_of(g, w, "below") == 1);
    CHECK(weight_of(g, w, "left") == Rational(1, 2));
    auto u = renormalize_levels(g);
    CHECK(u[0].exact() == 256);
}

TEST_CASE("validation errors")
{
    SUBCASE("three outgoing edges")
    {
        GraphDescription d;
        d.vertices = {{"p", 0}};
        d.edges = {{"", "-inf", "+inf"}, {"", "p", "+inf"}, {"", "p", "+inf"}, {"", "p", "+inf"}};
        CHECK_THROWS_AS(validate_graph(d), TrivalenceViolation);
    }
    SUBCASE("duplicate values")
    {
        GraphDescription d;
        d.vertices = {{"p", 0}, {"q", 0}};
        d.edges = {{"", "-inf", "p"}, {"", "p", "+inf"}, {"", "p", "+inf"},
                   {"", "-inf", "q"}, {"", "q", "+inf"}, {"", "q", "+inf"}};
        CHECK_THROWS_AS(validate_graph(d), DuplicateCriticalValue);
    }
    SUBCASE("gap in values")
    {
        GraphDescription d;
        d.vertices = {{"p", 0}, {"q", 2}};
        d.edges = {{"", "-inf", "p"}, {"", "p", "q"}, {"", "p", "q"}, {"", "q", "+inf"}};
        CHECK_THROWS_AS(validate_graph(d), ValueGap);
    }
    SUBCASE("values avoiding 0 and 1")
    {
        GraphDescription d;
        d.vertices = {{"p", 5}};
        d.edges = {{"", "-inf", "p"}, {"", "p", "+inf"}, {"", "p", "+inf"}};
        CHECK_THROWS_AS(validate_graph(d), ValueGap);
    }
    SUBCASE("empty level")
    {
        GraphDescription d;
        d.vertices = {{"p", 0}, {"q", 1}};
        d.edges = {{"", "-inf", "p"}, {"", "p", "q"}, {"", "p", "q"}};
        // q has in-degree 2 and no out-edge: trivalence fails first
        CHECK_THROWS_AS(validate_graph(d), TrivalenceViolation);
        GraphDescription empty;
        CHECK_THROWS_AS(validate_graph(empty), EmptyLevel);
    }
    SUBCASE("orientation")
    {
        GraphDescription d;
        d.vertices = {{"p", 1}, {"q", 0}};
        d.edges = {{"", "-inf", "p"}, {"", "p", "q"}};
        CHECK_THROWS_AS(validate_graph(d), MalformedGraph);
    }
    SUBCASE("nu too small")
    {
        GraphDescription d;
        for (int i = 0; i < 5; ++i)
            d.edges.push_back({"", "-inf", "+inf"});
        d.nu = 2;
        CHECK_THROWS_AS(validate_graph(d), NuTooSmall);
        d.nu = 3;
        CHECK(validate_graph(d).nu() == 3);
    }
}

TEST_CASE("weights of split and merge")
{
    auto g = validate_graph(split_graph());
    CHECK(g.crossing_count() == 2);
    auto w = assign_weights(g);
    CHECK(weight_of(g, w, "A") == Rational(1, 2));
    CHECK(weight_of(g, w, "A1") == Rational(1, 4));
    CHECK(weight_of(g, w, "A2") == Rational(1, 4));
    CHECK(weight_of(g, w, "C") == Rational(1, 2));
    // the two ends merging at b share the weight of A
    CHECK(weight_of(g, w, "L") == Rational(1, 4));
    CHECK(weight_of(g, w, "L") + weight_of(g, w, "R") == weight_of(g, w, "A"));
    auto sums = check_level_sums(g, w);
    CHECK(sums.all_passed());
    CHECK(sums.checks().size() == 3);
}

TEST_CASE("renormalized values")
{
    CHECK(phi(0, 1).exact() == 1);
    CHECK(phi(1, 1).exact() == 256);
    CHECK(phi(-1, 1).exact() == Rational(1, 256));
    CHECK(phi(3, 2).exponent16() == 15);
    CHECK(static_cast<double>(phi(1, 1).linear()) == 256.0);
    CHECK(static_cast<double>(phi(-1, 1).log_value()) == doctest::Approx(-2 * std::log(16.0)));
    // huge exponents stay exact
    CHECK(log2_of(phi(40, 3).exact()) == doctest::Approx(4.0 * 40 * 43));
    CHECK(default_nu(1) == 1);
    CHECK(default_nu(2) == 1);
    CHECK(default_nu(3) == 2);
    CHECK(default_nu(9) == 4);
}

TEST_CASE("lemma bounds and a constructed violation")
{
    auto g = validate_graph(split_graph());
    auto w = assign_weights(g);
    auto u = renormalize_levels(g);
    auto report = check_weight_bounds(g, w, u);
    CHECK(report.all_passed());

    // arithmetic of the bounds at f(p'')=1, N=2, nu=1
    CHECK(Rational(1, 2) * pow2(-2) == Rational(1, 8));
    CHECK(Rational(1, 4) >= Rational(1, 8));
    CHECK(Rational(1, 4) * phi(1, 1).exact() == 64);
    CHECK(64 >= 8 * phi(0, 1).exact());

    std::size_t a = 0;
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].id == "A")
            a = e;
    w.set(a, Rational(1, 100));
    auto bad = check_weight_bounds(g, w, u);
    CHECK_FALSE(bad.all_passed());
    bool found = false;
    for (const auto& c : bad.checks())
        if (c.name == "value_lower_bound[A]") {
            found = true;
            CHECK_FALSE(c.passed);
            // 2.56 < 8
            CHECK(c.measured == doctest::Approx(std::log2(2.56 / 8.0)));
        }
    CHECK(found);
}

TEST_CASE("corrupted weight is pinpointed")
{
    auto g = validate_graph(split_graph());
    auto w = assign_weights(g);
    std::size_t a = 0;
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        if (g.edges()[e].id == "A")
            a = e;
    w.set(a, Rational(1, 100));
    auto report = check_level_sums(g, w);
    CHECK_FALSE(report.all_passed());
    REQUIRE(report.data()["pinpointed_edges"].size() == 1);
    CHECK(report.data()["pinpointed_edges"][0] == "A");
}

TEST_CASE("random graphs: exact level sums and lemma bounds")
{
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 100; ++trial) {
        RandomGraphOptions opt;
        opt.all_levels_disconnected = trial % 2 == 0;
        auto d = random_graph(rng, opt);
        auto g = validate_graph(d);
        CHECK(g.vertices().size() <= 40);
        if (opt.all_levels_disconnected)
            CHECK(g.levels_all_disconnected());
        auto w = assign_weights(g);
        CHECK(check_level_sums(g, w).all_passed());
        CHECK(check_weight_bounds(g, w, renormalize_levels(g)).all_passed());
        for (const auto& x : w.values()) {
            CHECK(sgn(x) > 0);
            // denominator divides N * 2^k
            mpz_class den = x.get_den();
            while (den % 2 == 0)
                den /= 2;
            CHECK(mpz_class(static_cast<unsigned long>(g.crossing_count())) % den == 0);
        }
    }
}

TEST_CASE("weights are invariant under relabeling")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto d = random_graph(rng);
        auto g = validate_graph(d);
        auto w = assign_weights(g);

        GraphDescription r = d;
        std::map<std::string, std::string> rename;
        for (auto& v : r.vertices) {
            rename[v.id] = "renamed_" + v.id + "_x";
            v.id = rename[v.id];
        }
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
        for (std::size_t e = 0; e < g.edges().size(); ++e)
            CHECK(weight_of(g2, w2, g.edges()[e].id) == w[e]);
    }
}

TEST_CASE("description json roundtrip and parse errors")
{
    auto d = triply_punctured_sphere();
    auto again = parse_description(to_json(d));
    CHECK(again.vertices.size() == 1);
    CHECK(again.edges.size() == 3);
    Json bad = Json::parse(R"({"vertices":[{"id":"p","f":"x"}],"edges":[]})");
    try {
        parse_description(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("/vertices/0/f") != std::string::npos);
    }
}
