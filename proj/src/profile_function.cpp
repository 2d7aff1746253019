#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace isoprofile::revolution {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// derivatives of the quadratic through three points, evaluated at x1
std::pair<double, double> quadratic_derivatives(double x0, double y0, double x1, double y1, double x2, double y2,
                                                double at)
{
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double second = 2.0 * (d12 - d01) / (x2 - x0);
    // p(x) = y0 + d01 (x - x0) + (second/2)(x - x0)(x - x1)
    const double first = d01 + 0.5 * second * ((at - x0) + (at - x1));
    return {first, second};
}

}  // namespace

ProfileFunction ProfileFunction::from_nodes(std::vector<ProfileNode> nodes, std::string name)
{
    if (nodes.size() < 2)
        throw BadParameters("profile needs at least two nodes");
    ProfileFunction p;
    p.name_ = std::move(name);
    p.nodes_ = std::move(nodes);
    std::vector<SplineNode> sn;
    for (const auto& n : p.nodes_) {
        if (n.i2 < 0.0)
            throw NonPositiveProfile("I^2 < 0 at v=" + std::to_string(n.v));
        sn.push_back({n.v, n.i2, n.d1, n.d2});
    }
    p.spline_ = QuinticSpline(std::move(sn));
    p.v_max_ = p.nodes_.back().v;
    p.compute_flags();
    return p;
}

ProfileFunction ProfileFunction::from_samples(const std::vector<std::pair<double, double>>& grid, double anchor_d1,
                                              double anchor_d2, std::string name)
{
    if (grid.size() < 3)
        throw BadParameters("profile grid needs at least three points");
    std::vector<ProfileNode> nodes(grid.size());
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i].v = grid[i].first;
        nodes[i].i2 = grid[i].second;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
        auto [d1, d2] = quadratic_derivatives(grid[a].first, grid[a].second, grid[a + 1].first, grid[a + 1].second,
                                              grid[a + 2].first, grid[a + 2].second, grid[i].first);
        nodes[i].d1 = d1;
        nodes[i].d2 = d2;
    }
    if (grid.front().first == 0.0) {
        nodes.front().d1 = anchor_d1;
        nodes.front().d2 = anchor_d2;
    }
    return from_nodes(std::move(nodes), std::move(name));
}

ProfileFunction ProfileFunction::from_closed_form(JetFn i2, double v_max, double grid_limit, std::string name,
                                                  ScalarFn ratio, std::size_t grid)
{
    if (!(grid_limit > 0.0) || grid < 3)
        throw BadParameters("closed-form profile needs a positive grid limit");
    grid_limit = std::min(grid_limit, v_max);
    ProfileFunction p;
    p.name_ = std::move(name);
    p.closed_ = std::move(i2);
    p.ratio_fn_ = std::move(ratio);
    p.v_max_ = v_max;
    p.nodes_.resize(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(grid - 1);
        const double v = i + 1 == grid ? grid_limit : grid_limit * s * s;
        const Jet j = p.closed_(v);
        p.nodes_[i] = {v, j.value, j.d1, j.d2};
    }
    p.compute_flags();
    return p;
}

void ProfileFunction::compute_flags()
{
    nondecreasing_ = true;
    ratio_nonincreasing_ = true;
    convex_ = true;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.d1 < -1e-9 * std::max(1.0, std::abs(n.i2)))
            nondecreasing_ = false;
        if (i > 0 && n.i2 < nodes_[i - 1].i2 * (1 - 1e-12) - 1e-300)
            nondecreasing_ = false;
        if (n.v <= 0.0)
            continue;
        // (I/v)' <= 0  <=>  2 I^2 - v (I^2)' >= 0
        const double dr = 2.0 * n.i2 - n.v * n.d1;
        if (dr < -1e-9 * (2.0 * std::abs(n.i2) + std::abs(n.v * n.d1)))
            ratio_nonincreasing_ = false;
        // I'' >= 0  <=>  2 I^2 (I^2)'' - ((I^2)')^2 >= 0
        const double cv = 2.0 * n.i2 * n.d2 - n.d1 * n.d1;
        if (cv < -1e-9 * (2.0 * std::abs(n.i2 * n.d2) + n.d1 * n.d1))
            convex_ = false;
    }
}

Jet ProfileFunction::i2(double v) const
{
    if (v < 0.0 || v > v_max_ * (1 + 1e-12))
        throw DomainError("profile '" + name_ + "' evaluated at v=" + std::to_string(v) + " outside [0, " +
                          std::to_string(v_max_) + "]");
    if (closed_)
        return closed_(v);
    return spline_.eval(v);
}

double ProfileFunction::value(double v) const
{
    if (ratio_fn_ && v > 0.0)
        return ratio_fn_(v) * v;
    return std::sqrt(std::max(0.0, i2(v).value));
}

double ProfileFunction::derivative(double v) const
{
    const double iv = value(v);
    return i2(v).d1 / (2.0 * iv);
}

double ProfileFunction::ratio(double v) const
{
    if (ratio_fn_)
        return ratio_fn_(v);
    return value(v) / v;
}

Json ProfileFunction::to_json() const
{
    Json j = Json::object();
    j["name"] = name_;
    j["v_max"] = json_number(v_max_);
    j["flags"] = {{"nondecreasing", nondecreasing_},
                  {"ratio_nonincreasing", ratio_nonincreasing_},
                  {"convex", convex_}};
    const Jet a = i2(0.0);
    j["anchors"] = {{"I2", a.value}, {"d1", a.d1}, {"d2", a.d2}};
    Json grid = Json::array();
    for (const auto& n : nodes_)
        grid.push_back({{"v", n.v}, {"I2", n.i2}});
    j["grid"] = std::move(grid);
    return j;
}

namespace {

// I = t0 J(v / t0); J(x) = x on [0,1], C2 convex blend on [1,5], x log x beyond
struct VLogV {
    double t0 = 1.0;
    double x = 0.0, y = 0.0;  // I'' at the two interior blend knots

    static constexpr double t1 = 5.0;

    VLogV(double t0_) : t0(t0_)
    {
        // I'' on [1,5] is piecewise linear through (1,0), (k1,x), (k2,y), (5,1/5)
        const double k1 = 1.0 + (t1 - 1.0) / 3.0, k2 = 1.0 + 2.0 * (t1 - 1.0) / 3.0;
        const std::array<double, 4> kn{1.0, k1, k2, t1};
        // moments of the hat functions attached to k1, k2 and of the last ramp
        auto hat_moments = [&](int j, double& m0, double& m1) {
            // integrals of phi_j and (t1 - s) phi_j over the support
            m0 = 0.0;
            m1 = 0.0;
            for (int seg = 0; seg < 3; ++seg) {
                const double a = kn[seg], b = kn[seg + 1];
                auto phi = [&](double s) {
                    if (j == seg)
                        return (b - s) / (b - a);
                    if (j == seg + 1)
                        return (s - a) / (b - a);
                    return 0.0;
                };
                // Simpson is exact for these quadratics
                const double mid = 0.5 * (a + b);
                m0 += (b - a) / 6.0 * (phi(a) + 4 * phi(mid) + phi(b));
                m1 += (b - a) / 6.0 * ((t1 - a) * phi(a) + 4 * (t1 - mid) * phi(mid) + (t1 - b) * phi(b));
            }
        };
        double a1, b1, a2, b2, a3, b3;
        hat_moments(1, a1, b1);
        hat_moments(2, a2, b2);
        hat_moments(3, a3, b3);
        const double r0 = std::log(t1) - a3 / t1;
        const double r1 = t1 * std::log(t1) - t1 - b3 / t1;
        const double det = a1 * b2 - a2 * b1;
        x = (r0 * b2 - a2 * r1) / det;
        y = (a1 * r1 - b1 * r0) / det;
        if (x < 0.0 || y < 0.0)
            throw NonConvexProfile("v log v blend is not convex");
    }

    // J, J', J'' at s
    Jet unit(double s) const
    {
        if (s <= 1.0)
            return {s, 1.0, 0.0};
        if (s >= t1)
            return {s * std::log(s), std::log(s) + 1.0, 1.0 / s};
        const double k1 = 1.0 + (t1 - 1.0) / 3.0, k2 = 1.0 + 2.0 * (t1 - 1.0) / 3.0;
        const std::array<double, 4> kn{1.0, k1, k2, t1};
        const std::array<double, 4> hv{0.0, x, y, 1.0 / t1};
        double J = 1.0, J1 = 1.0;
        for (int seg = 0; seg < 3; ++seg) {
            const double a = kn[seg], b = std::min(kn[seg + 1], s);
            if (b <= a)
                break;
            const double m = (hv[seg + 1] - hv[seg]) / (kn[seg + 1] - a);
            const double L = b - a;
            const double h0 = hv[seg];
            J += J1 * L + h0 * L * L / 2 + m * L * L * L / 6;
            J1 += h0 * L + m * L * L / 2;
            if (s <= kn[seg + 1])
                return {J, J1, h0 + m * L};
        }
        return {J, J1, 1.0 / t1};
    }

    Jet profile(double v) const
    {
        const Jet u = unit(v / t0);
        return {t0 * u.value, u.d1, u.d2 / t0};
    }
};

Jet square_jet(const Jet& i)
{
    return {i.value * i.value, 2.0 * i.value * i.d1, 2.0 * (i.d1 * i.d1 + i.value * i.d2)};
}

}  // namespace

ProfileFunction preset(const std::string& name, double v_max)
{
    if (name == "euclidean")
        return ProfileFunction::from_closed_form([](double v) { return Jet{four_pi * v, four_pi, 0.0}; }, v_max,
                                                 v_max, name);
    if (name == "hyperbolic")
        return ProfileFunction::from_closed_form(
            [](double v) { return Jet{v * v + four_pi * v, 2.0 * v + four_pi, 2.0}; }, v_max, v_max, name);
    if (name.rfind("bolfiala:", 0) == 0) {
        const double k = std::stod(name.substr(9));
        double top = v_max;
        if (k > 0.0)
            top = std::min(v_max, 0.9 * four_pi / k);
        return ProfileFunction::from_closed_form(
            [k](double v) { return Jet{four_pi * v - k * v * v, four_pi - 2.0 * k * v, -2.0 * k}; }, top, top,
            name);
    }
    if (name == "linear")
        return ProfileFunction::from_closed_form([](double v) { return Jet{v * v, 2.0 * v, 2.0}; },
                                                 std::numeric_limits<double>::infinity(), v_max, name,
                                                 [](double) { return 1.0; });
    if (name == "vlogv" || name.rfind("vlogv:", 0) == 0) {
        const double t0 = name == "vlogv" ? 1.0 : std::stod(name.substr(6));
        if (!(t0 > 0.0))
            throw BadParameters("vlogv seam must be positive");
        const VLogV shape(t0);
        return ProfileFunction::from_closed_form(
            [shape](double v) { return square_jet(shape.profile(v)); }, std::numeric_limits<double>::infinity(),
            v_max, name,
            [shape](double v) {
                if (v >= VLogV::t1 * shape.t0)
                    return std::log(v / shape.t0);
                return shape.profile(v).value / v;
            });
    }
    throw ParseError("unknown profile preset '" + name + "'");
}

ProfileFunction parse_profile(const Json& j)
{
    if (j.is_string())
        return preset(j.get<std::string>());
    if (!j.is_object())
        throw ParseError("/: profile must be an object or a preset name");
    if (j.contains("preset")) {
        const double vmax = j.contains("v_max") ? number_from_json(j.at("v_max")) : 50.0;
        return preset(j.at("preset").get<std::string>(), vmax);
    }
    if (!j.contains("grid") || !j.at("grid").is_array())
        throw ParseError("/grid: expected an array");
    std::vector<std::pair<double, double>> grid;
    const Json& g = j.at("grid");
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::string where = "/grid/" + std::to_string(i);
        if (!g[i].is_object() || !g[i].contains("v") || !g[i].contains("I2"))
            throw ParseError(where + ": expected {\"v\", \"I2\"}");
        grid.emplace_back(number_from_json(g[i].at("v")), number_from_json(g[i].at("I2")));
        if (i > 0 && !(grid[i].first > grid[i - 1].first))
            throw ParseError(where + "/v: grid must be strictly increasing");
    }
    double d1 = four_pi, d2 = 0.0;
    if (j.contains("anchors")) {
        const Json& a = j.at("anchors");
        if (a.contains("d1"))
            d1 = number_from_json(a.at("d1"));
        if (a.contains("d2"))
            d2 = number_from_json(a.at("d2"));
    }
    return ProfileFunction::from_samples(grid, d1, d2, "file");
}

ProfileFunction load_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return parse_profile(Json::parse(in));
    } catch (const Json::parse_error& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

}  // namespace isoprofile::revolution
