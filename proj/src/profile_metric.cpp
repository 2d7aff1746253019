#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isoprofile::revolution {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double four_pi = 4.0 * pi;
}  // namespace

ProfileFunction profile_from_metric(const RevolutionSurface& s)
{
    const auto& nodes = s.nodes();
    const bool pole = s.has_pole();
    for (std::size_t i = pole ? 1 : 0; i < nodes.size(); ++i)
        if (!(nodes[i].f > 0.0))
            throw NonPositiveProfile("f vanishes at r=" + std::to_string(nodes[i].r));

    // areas recomputed from the interpolated f, independently of the stored node areas
    std::vector<ProfileNode> out;
    out.reserve(nodes.size());
    double v = pole ? 0.0 : nodes.front().area;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0)
            v += two_pi * integrate([&s](double r) { return s.f(r).value; }, nodes[i - 1].r, nodes[i].r, 1e-14);
        const auto& n = nodes[i];
        ProfileNode p;
        p.v = v;
        p.i2 = 4.0 * pi * pi * n.f * n.f;
        p.d1 = four_pi * n.d1;
        p.d2 = (pole && i == 0) ? -2.0 * s.curvature(0.0) : 2.0 * n.d2 / n.f;
        out.push_back(p);
    }
    return ProfileFunction::from_nodes(std::move(out), "from_metric");
}

RevolutionSurface metric_from_profile(const ProfileFunction& profile, const MetricOptions& opt)
{
    const Jet origin = profile.i2(0.0);
    if (std::abs(origin.value) > 1e-12 || std::abs(origin.d1 - four_pi) > 1e-6 * four_pi)
        throw BadOrigin("(I^2)'(0) = " + std::to_string(origin.d1) + " instead of 4 pi");
    double v_end = opt.v_end > 0.0 ? opt.v_end
                                   : (std::isfinite(profile.v_max()) ? profile.v_max() : profile.grid_limit());
    v_end = std::min(v_end, profile.v_max());
    if (!(v_end > opt.v0))
        throw BadParameters("metric target area must exceed the start area");

    // V ~ pi r^2 near the pole
    const double r0 = std::sqrt(opt.v0 / pi);
    DenseOde::Options ode;
    ode.rtol = opt.rtol;
    ode.atol = opt.atol;
    auto rhs = [&profile, v_end](double, double v) { return profile.value(std::clamp(v, 0.0, v_end)); };
    const DenseOde sol = DenseOde::integrate(rhs, r0, opt.v0, 1e7, ode, [v_end](double, double v) { return v >= v_end; });
    if (sol.y_end() < v_end)
        throw DomainError("profile ODE did not reach the target area");

    // radius where V = v_end, inside the last step
    const auto mesh = sol.mesh();
    double lo = mesh.size() > 1 ? mesh[mesh.size() - 2] : r0, hi = sol.x_end();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sol.value(mid) < v_end ? lo : hi) = mid;
    }
    const double r_end = hi;

    std::vector<RadialNode> nodes;
    nodes.push_back({0.0, 0.0, origin.d1 / four_pi, 0.0, 0.0});
    auto add = [&](double r) {
        const double v = std::min(sol.value(r), v_end);
        const Jet j = profile.i2(v);
        const double iv = profile.value(v);
        nodes.push_back({r, iv / two_pi, j.d1 / four_pi, iv * j.d2 / four_pi, v});
    };
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
        const double a = mesh[k], b = std::min(mesh[k + 1], r_end);
        if (a >= r_end)
            break;
        for (std::size_t j = 0; j < opt.subdivisions; ++j)
            add(a + (b - a) * static_cast<double>(j) / static_cast<double>(opt.subdivisions));
    }
    add(r_end);
    return RevolutionSurface::from_nodes(std::move(nodes));
}

RoundtripResult roundtrip(const ProfileFunction& profile, MetricOptions opt, double target, double v_min)
{
    RoundtripResult result;
    for (int attempt = 1; attempt <= 4; ++attempt) {
        result.attempts = attempt;
        result.rtol_used = opt.rtol;
        result.surface = metric_from_profile(profile, opt);
        const ProfileFunction back = profile_from_metric(result.surface);
        double err = 0.0;
        for (const auto& n : back.nodes()) {
            if (n.v < v_min || n.v > profile.v_max())
                continue;
            const double expect = profile.value(n.v);
            err = std::max(err, std::abs(std::sqrt(n.i2) - expect) / expect);
        }
        result.sup_relative_error = err;
        if (err < target)
            break;
        opt.rtol /= 2;
        opt.atol /= 2;
    }
    return result;
}

double curvature_of_profile(const ProfileFunction& profile, double v)
{
    const double h = 1e-3 * std::max(v, 1e-2);
    auto y = [&profile](double x) { return profile.i2(x).value; };
    double second;
    if (v < 2.0 * h || v + h > profile.v_max()) {
        const double s = v + h > profile.v_max() ? -h : h;
        // one-sided, second order
        second = (2.0 * y(v) - 5.0 * y(v + s) + 4.0 * y(v + 2 * s) - y(v + 3 * s)) / (h * h);
    } else {
        second = (y(v + h) - 2.0 * y(v) + y(v - h)) / (h * h);
    }
    return -0.5 * second;
}

}  // namespace isoprofile::revolution
