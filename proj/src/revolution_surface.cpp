#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isoprofile::revolution {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

RevolutionSurface RevolutionSurface::from_function(const std::function<Jet(double)>& f, double r_begin,
                                                   double r_end, std::size_t intervals, double area_at_begin)
{
    if (!(r_end > r_begin) || intervals < 2)
        throw BadParameters("surface needs r_end > r_begin and at least two intervals");
    RevolutionSurface s;
    s.nodes_.resize(intervals + 1);
    const double h = (r_end - r_begin) / static_cast<double>(intervals);
    double area = area_at_begin;
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double r = i == intervals ? r_end : r_begin + h * static_cast<double>(i);
        const Jet j = f(r);
        if (i > 0) {
            const double a = s.nodes_[i - 1].r;
            area += two_pi * integrate([&f](double x) { return f(x).value; }, a, r);
        }
        s.nodes_[i] = {r, j.value, j.d1, j.d2, area};
    }
    std::vector<SplineNode> sn;
    sn.reserve(s.nodes_.size());
    for (const auto& n : s.nodes_)
        sn.push_back({n.r, n.f, n.d1, n.d2});
    s.spline_ = QuinticSpline(std::move(sn));
    return s;
}

RevolutionSurface RevolutionSurface::from_nodes(std::vector<RadialNode> nodes)
{
    if (nodes.size() < 2)
        throw BadParameters("surface needs at least two nodes");
    RevolutionSurface s;
    s.nodes_ = std::move(nodes);
    std::vector<SplineNode> sn;
    sn.reserve(s.nodes_.size());
    for (const auto& n : s.nodes_)
        sn.push_back({n.r, n.f, n.d1, n.d2});
    s.spline_ = QuinticSpline(std::move(sn));
    for (std::size_t i = 1; i < s.nodes_.size(); ++i) {
        const auto& sp = s.spline_;
        s.nodes_[i].area = s.nodes_[i - 1].area +
                           two_pi * integrate([&sp](double x) { return sp.eval(x).value; }, s.nodes_[i - 1].r,
                                              s.nodes_[i].r);
    }
    return s;
}

double RevolutionSurface::area(double r) const
{
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r,
                               [](double x, const RadialNode& n) { return x < n.r; });
    std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (i + 1 >= nodes_.size())
        i = nodes_.size() - 2;
    return nodes_[i].area + two_pi * (spline_.primitive(r) - spline_.primitive(nodes_[i].r));
}

double RevolutionSurface::radius_for_area(double v) const
{
    if (v <= nodes_.front().area)
        return nodes_.front().r;
    if (v > nodes_.back().area * (1 + 1e-12))
        throw DomainError("area " + std::to_string(v) + " exceeds the surface area " +
                          std::to_string(nodes_.back().area));
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), v,
                               [](const RadialNode& n, double x) { return n.area < x; });
    if (it == nodes_.end())
        return nodes_.back().r;
    const std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
    double a = nodes_[hi - 1].r, b = nodes_[hi].r;
    double r = 0.5 * (a + b);
    for (int iter = 0; iter < 100; ++iter) {
        const double g = area(r) - v;
        if (g > 0)
            b = r;
        else
            a = r;
        const double fr = spline_.eval(r).value;
        double next = fr > 0 ? r - g / (two_pi * fr) : 0.5 * (a + b);
        if (!(next > a && next < b))
            next = 0.5 * (a + b);
        if (std::abs(next - r) <= 1e-16 * std::max(1.0, std::abs(r)) || b - a < 1e-300) {
            r = next;
            break;
        }
        r = next;
    }
    return r;
}

double RevolutionSurface::curvature(double r) const
{
    if (has_pole() && nodes_.size() > 3 && r < nodes_[2].r) {
        // -f''/f is singular-looking at the pole: extrapolate from two nodes away from it
        const double r1 = nodes_[2].r, r2 = nodes_[3].r;
        const double k1 = curvature(r1), k2 = curvature(r2);
        return k1 + (k2 - k1) * (r - r1) / (r2 - r1);
    }
    const Jet j = spline_.eval(r);
    return -j.d2 / j.value;
}

double RevolutionSurface::max_curvature() const
{
    double k = -std::numeric_limits<double>::infinity();
    for (const auto& n : nodes_)
        k = std::max(k, curvature(n.r));
    return k;
}

Json RevolutionSurface::to_json() const
{
    Json j = Json::object();
    j["r_begin"] = r_begin();
    j["r_end"] = r_end();
    j["total_area"] = json_number(total_area());
    j["has_pole"] = has_pole();
    j["nodes"] = nodes_.size();
    return j;
}

RevolutionSurface euclidean_disk(double radius, std::size_t intervals)
{
    return RevolutionSurface::from_function([](double r) { return Jet{r, 1.0, 0.0}; }, 0.0, radius, intervals);
}

RevolutionSurface hyperbolic_disk(double radius, std::size_t intervals)
{
    return RevolutionSurface::from_function(
        [](double r) { return Jet{std::sinh(r), std::cosh(r), std::sinh(r)}; }, 0.0, radius, intervals);
}

RevolutionSurface spherical_cap(double k, double radius, std::size_t intervals)
{
    if (!(k > 0.0))
        throw BadParameters("spherical cap needs k > 0");
    const double s = std::sqrt(k);
    if (radius >= std::numbers::pi / s)
        throw BadParameters("spherical cap radius reaches the antipode");
    return RevolutionSurface::from_function(
        [s, k](double r) { return Jet{std::sin(s * r) / s, std::cos(s * r), -k * std::sin(s * r) / s}; }, 0.0,
        radius, intervals);
}

RevolutionSurface exponential_end(double r_begin, double r_end, std::size_t intervals)
{
    return RevolutionSurface::from_function(
        [](double r) {
            const double e = std::exp(r);
            return Jet{e, e, e};
        },
        r_begin, r_end, intervals, two_pi * std::exp(r_begin));
}

}  // namespace isoprofile::revolution
