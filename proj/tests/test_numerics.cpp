#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isoprofile/numerics.hpp"
#include "isoprofile/rational.hpp"
#include "isoprofile/report.hpp"

#include <cmath>

using namespace isoprofile;

TEST_CASE("quintic spline reproduces a quintic exactly")
{
    auto p = [](double x) { return Jet{1 - 2 * x + x * x * x * x * x, -2 + 5 * x * x * x * x, 20 * x * x * x}; };
    std::vector<SplineNode> nodes;
    for (double x : {0.0, 0.3, 1.1, 2.0}) {
        const Jet j = p(x);
        nodes.push_back({x, j.value, j.d1, j.d2});
    }
    QuinticSpline s(nodes);
    for (double x = 0.0; x <= 2.0; x += 0.07) {
        const Jet a = s.eval(x), b = p(x);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
        CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-11));
        CHECK(a.d2 == doctest::Approx(b.d2).epsilon(1e-10));
    }
    // primitive of 1 - 2x + x^5 on [0, 1.7]
    const double x = 1.7;
    CHECK(s.primitive(x) == doctest::Approx(x - x * x + std::pow(x, 6) / 6).epsilon(1e-13));
}

TEST_CASE("dopri5 solves y' = y with accurate dense output and derivative")
{
    DenseOde::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    auto sol = DenseOde::integrate([](double, double y) { return y; }, 0.0, 1.0, 3.0, opt);
    CHECK(sol.x_end() == 3.0);
    for (double x = 0.0; x <= 3.0; x += 0.013) {
        CHECK(sol.value(x) == doctest::Approx(std::exp(x)).epsilon(1e-10));
        CHECK(sol.derivative(x) == doctest::Approx(std::exp(x)).epsilon(1e-8));
    }
}

TEST_CASE("dopri5 stop predicate and backward integration")
{
    DenseOde::Options opt;
    auto sol = DenseOde::integrate([](double, double y) { return -y; }, 2.0, 1.0, 0.0, opt);
    CHECK(sol.value(0.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
    auto stopped = DenseOde::integrate([](double, double) { return 1.0; }, 0.0, 0.0, 100.0, opt,
                                       [](double, double y) { return y > 5.0; });
    CHECK(stopped.x_end() < 100.0);
    CHECK(stopped.y_end() > 5.0);
}

TEST_CASE("rational helpers")
{
    CHECK(pow16(2) == 256);
    CHECK(pow16(-2) == Rational(1, 256));
    CHECK(to_long_double(Rational(1, 3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-18));
    CHECK(log2_of(pow2(5000)) == doctest::Approx(5000.0));
    const long double big = to_long_double(pow2(3000) / 3);
    CHECK(std::log2(big) == doctest::Approx(3000.0 - std::log2(3.0)));
    CHECK(parse_rational("6/4") == Rational(3, 2));
}

TEST_CASE("json serializer writes 17 digits and non-finite strings")
{
    Json j = Json::object();
    j["a"] = 0.1;
    j["b"] = json_number(INFINITY);
    j["c"] = 2.0;
    const std::string s = dump_json(j, -1);
    CHECK(s == "{\"a\":0.10000000000000001,\"b\":\"inf\",\"c\":2.0}\n");
    CHECK(std::isinf(number_from_json(j["b"])));
}

TEST_CASE("parallel_for covers every index")
{
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit)
        CHECK(h == 1);
}
