#include "isoprofile/cusp_assembly.hpp"

#include "isoprofile/errors.hpp"
#include "isoprofile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace isoprofile::cusp_assembly {

using level_graph::LevelGraph;
using level_graph::LevelValue;
using level_graph::Weighting;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

AnnulusGeometry annulus_geometry(const Annulus& a)
{
    if (!(a.tau > 0.0) || !std::isfinite(a.tau))
        throw BadParameters("annulus needs tau > 0");
    if (!(a.c >= 0.0) || !(a.c < a.c_prime) || std::isinf(a.c))
        throw BadParameters("annulus needs 0 <= c < c'");
    AnnulusGeometry g;
    g.area = std::isinf(a.c_prime) ? inf : a.tau * (a.c_prime - a.c);
    if (a.c > 0.0)
        g.boundary_lengths.push_back(a.c * a.tau);
    if (std::isfinite(a.c_prime))
        g.boundary_lengths.push_back(a.c_prime * a.tau);
    g.height = (a.c == 0.0 || std::isinf(a.c_prime)) ? inf : std::log(a.c_prime / a.c);
    return g;
}

Annulus normalized(const Annulus& a)
{
    if (!(a.c > 0.0))
        throw BadParameters("a cusp has no normalized form");
    return {a.c * a.tau, 1.0, a.c_prime / a.c};
}

long double ExtendedLevel::linear() const
{
    return infinite ? HUGE_VALL : to_long_double(value);
}

std::optional<Rational> PantsPiece::area() const
{
    if (upper.infinite)
        return std::nullopt;
    return weight * (upper.value - lower.value);
}

SingularSurface assemble_surface(const LevelGraph& g, const Weighting& w, const std::vector<LevelValue>& u)
{
    if (w.size() != g.edges().size() || u.size() != g.vertices().size())
        throw BadParameters("weights or levels do not match the graph");
    SingularSurface s;
    s.n_ = g.crossing_count();
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edges()[e];
        PantsPiece p;
        p.edge = e;
        p.edge_id = edge.id;
        p.weight = w[e];
        if (edge.source.is_vertex()) {
            p.lower.value = u[edge.source.vertex].exact();
            p.lower_vertex = edge.source.vertex;
        }
        if (edge.target.is_vertex()) {
            p.upper.value = u[edge.target.vertex].exact();
            p.upper_vertex = edge.target.vertex;
        } else {
            p.upper.infinite = true;
        }
        s.pieces_.push_back(std::move(p));
    }

    for (std::size_t i = 0; i < g.vertices().size(); ++i) {
        const auto& v = g.vertices()[i];
        const Rational uv = u[i].exact();
        auto circle = [&](const std::vector<std::size_t>& edges) {
            GluedCircle c;
            c.vertex = i;
            c.edges = edges;
            c.length = 0;
            for (auto e : edges) {
                c.arc_lengths.push_back(w[e] * uv);
                c.length += c.arc_lengths.back();
            }
            return c;
        };
        SingularPoint pt;
        pt.vertex = i;
        pt.id = v.id;
        pt.u = u[i];
        pt.single_side = circle(v.is_split() ? v.in : v.out);
        pt.split_side = circle(v.is_split() ? v.out : v.in);
        if (pt.single_side.length != pt.split_side.length)
            throw GluingMismatch("circle lengths differ at vertex " + v.id + ": " +
                                 to_string(pt.single_side.length) + " vs " +
                                 to_string(pt.split_side.length));
        pt.cone_angle = cone_angle(0.5);
        s.points_.push_back(std::move(pt));
    }
    return s;
}

Rational SingularSurface::sublevel_area(const Rational& t) const
{
    Rational total = 0;
    for (const auto& p : pieces_) {
        if (t <= p.lower.value)
            continue;
        const Rational top = (p.upper.infinite || t < p.upper.value) ? t : p.upper.value;
        total += p.weight * (top - p.lower.value);
    }
    return total;
}

long double SingularSurface::sublevel_area(long double t) const
{
    long double total = 0.0L;
    for (const auto& p : pieces_) {
        const long double lo = p.lower.linear();
        if (t <= lo)
            continue;
        const long double hi = p.upper.linear();
        total += to_long_double(p.weight) * (std::min(t, hi) - lo);
    }
    return total;
}

Rational SingularSurface::band_area(const Rational& s, const Rational& t) const
{
    return sublevel_area(t) - sublevel_area(s);
}

std::vector<std::size_t> SingularSurface::pieces_crossing(const Rational& t) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (p.lower.value < t && (p.upper.infinite || t < p.upper.value))
            out.push_back(i);
    }
    return out;
}

double SingularSurface::chart_radius(std::size_t point) const
{
    const auto& pt = points_.at(point);
    Rational shortest = pt.split_side.arc_lengths.front();
    for (const auto& a : pt.split_side.arc_lengths)
        shortest = std::min(shortest, a);
    const double l = static_cast<double>(to_long_double(shortest));
    return std::min(std::log(2.0), std::asinh(l / 2.0));
}

Json SingularSurface::to_json() const
{
    Json j = Json::object();
    j["N"] = n_;
    Json ps = Json::array();
    for (const auto& p : pieces_) {
        Json jp = Json::object();
        jp["edge"] = p.edge_id;
        jp["weight"] = to_string(p.weight);
        jp["c"] = json_number(static_cast<double>(p.lower.linear()));
        jp["c_prime"] = json_number(static_cast<double>(p.upper.linear()));
        const auto a = p.area();
        jp["area"] = a ? to_string(*a) : std::string("inf");
        ps.push_back(std::move(jp));
    }
    j["pieces"] = std::move(ps);
    Json vs = Json::array();
    for (const auto& pt : points_) {
        Json jv = Json::object();
        jv["id"] = pt.id;
        jv["u_exponent16"] = pt.u.exponent16();
        jv["u"] = json_number(static_cast<double>(pt.u.linear()));
        auto side = [&](const GluedCircle& c) {
            Json js = Json::object();
            js["length"] = to_string(c.length);
            Json arcs = Json::array();
            for (const auto& a : c.arc_lengths)
                arcs.push_back(to_string(a));
            js["arcs"] = std::move(arcs);
            return js;
        };
        jv["single_side"] = side(pt.single_side);
        jv["split_side"] = side(pt.split_side);
        jv["cone_angle"] = pt.cone_angle;
        vs.push_back(std::move(jv));
    }
    j["singular_points"] = std::move(vs);
    return j;
}

std::vector<std::pair<double, double>> sublevel_samples(const SingularSurface& s, double t_max,
                                                        std::size_t count)
{
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i <= count; ++i) {
        const long double t = static_cast<long double>(t_max) * i / count;
        out.emplace_back(static_cast<double>(t), static_cast<double>(s.sublevel_area(t)));
    }
    return out;
}

namespace {

double model_w0(double u_p, std::complex<double> z)
{
    const std::complex<double> i(0.0, 1.0);
    const double r2 = std::norm(z);
    return u_p * std::norm(z * z - i) / (1.0 - r2 * r2);
}

double model_lambda(std::complex<double> z)
{
    const double r2 = std::norm(z);
    const double d = 1.0 - r2 * r2;
    return 16.0 * r2 / (d * d);
}

}  // namespace

ModelSample singular_model_eval(double u_p, std::complex<double> z, double chart_radius)
{
    if (!(chart_radius > 0.0) || chart_radius > std::log(2.0) + 1e-15)
        throw OutOfChart("chart radius must lie in (0, log 2]");
    const double bound = std::sqrt(std::tanh(chart_radius));
    if (std::abs(z) >= bound)
        throw OutOfChart("|z| = " + std::to_string(std::abs(z)) + " outside the chart radius " +
                         std::to_string(bound));
    ModelSample s;
    s.w0 = model_w0(u_p, z);
    s.conformal_factor = model_lambda(z);
    if (std::abs(z) < 1e-6)
        return s;

    // K = -Laplacian(log lambda / 2) / lambda, five-point stencil
    const double h = 1e-3 * std::abs(z);
    auto half_log = [](std::complex<double> p) { return 0.5 * std::log(model_lambda(p)); };
    const std::complex<double> dx(h, 0.0), dy(0.0, h);
    const double lap = (half_log(z + dx) + half_log(z - dx) + half_log(z + dy) + half_log(z - dy) -
                        4.0 * half_log(z)) /
                       (h * h);
    s.curvature = -lap / s.conformal_factor;

    const double k = 1e-6 * std::abs(z);
    const std::complex<double> ex(k, 0.0), ey(0.0, k);
    const double gx = (model_w0(u_p, z + ex) - model_w0(u_p, z - ex)) / (2 * k);
    const double gy = (model_w0(u_p, z + ey) - model_w0(u_p, z - ey)) / (2 * k);
    s.gradient_ratio = std::hypot(gx, gy) / (std::sqrt(s.conformal_factor) * s.w0);
    return s;
}

double cone_angle(double rho, std::size_t samples)
{
    if (!(rho > 0.0 && rho < 1.0))
        throw OutOfChart("cone angle radius must lie in (0, 1)");
    // length of |z| = rho by the trapezoid rule, radius by quadrature of sqrt(lambda) along a ray
    double length = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
        length += std::sqrt(model_lambda(std::polar(rho, th))) * rho;
    }
    length *= 2.0 * std::numbers::pi / static_cast<double>(samples);
    const double radius =
        integrate([](double s) { return std::sqrt(model_lambda(std::complex<double>(s, 0.0))); }, 0.0, rho);
    return length / std::sinh(radius);
}

}  // namespace isoprofile::cusp_assembly
