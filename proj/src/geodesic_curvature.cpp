#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <cmath>
#include <numbers>

namespace isoprofile::revolution {

RadialMetric euclidean_metric()
{
    return {[](double r) { return Jet{r, 1.0, 0.0}; }, [](double r) { return 0.5 * r * r; }};
}

RadialMetric hyperbolic_metric()
{
    return {[](double r) { return Jet{std::sinh(r), std::cosh(r), std::sinh(r)}; },
            [](double r) { return std::cosh(r) - 1.0; }};
}

RadialMetric spherical_metric(double k)
{
    const double s = std::sqrt(k);
    return {[s, k](double r) { return Jet{std::sin(s * r) / s, std::cos(s * r), -k * std::sin(s * r) / s}; },
            [s, k](double r) { return (1.0 - std::cos(s * r)) / k; }};
}

RadialMetric metric_of(const RevolutionSurface& s)
{
    return {[&s](double r) { return s.f(r); },
            [&s](double r) { return s.area(r) / (2.0 * std::numbers::pi); }};
}

Jet FourierCurve::at(double theta) const
{
    Jet j{r0, 0.0, 0.0};
    for (std::size_t m = 1; m <= a.size(); ++m) {
        const double k = static_cast<double>(m);
        const double c = std::cos(k * theta), s = std::sin(k * theta);
        const double bm = m <= b.size() ? b[m - 1] : 0.0;
        j.value += a[m - 1] * c + bm * s;
        j.d1 += k * (-a[m - 1] * s + bm * c);
        j.d2 += -k * k * (a[m - 1] * c + bm * s);
    }
    return j;
}

double geodesic_curvature(const RadialMetric& metric, const FourierCurve& curve, double theta)
{
    const Jet rho = curve.at(theta);
    const Jet g = metric.g(rho.value);
    if (!(g.value > 0.0))
        throw DomainError("metric degenerates along the curve");
    const double num = -g.value * rho.d2 + g.d1 * g.value * g.value + 2.0 * g.d1 * rho.d1 * rho.d1;
    const double q = g.value * g.value + rho.d1 * rho.d1;
    return num / (q * std::sqrt(q));
}

CurveMeasure measure_curve(const RadialMetric& metric, const FourierCurve& curve, std::size_t samples)
{
    CurveMeasure m;
    const double dt = 2.0 * std::numbers::pi / static_cast<double>(samples);
    m.theta.resize(samples);
    m.kappa.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double th = dt * static_cast<double>(i);
        const Jet rho = curve.at(th);
        const Jet g = metric.g(rho.value);
        m.theta[i] = th;
        m.kappa[i] = geodesic_curvature(metric, curve, th);
        m.length += std::sqrt(g.value * g.value + rho.d1 * rho.d1);
        m.area += metric.primitive(rho.value);
    }
    m.length *= dt;
    m.area *= dt;
    return m;
}

StabilityReport stability_and_spectrum(const Jet& f, double resonance_tol)
{
    StabilityReport s;
    s.spectral_value = f.d1 * f.d1 - f.d2 * f.value;
    s.strictly_stable = s.spectral_value < 1.0;
    const double root = std::sqrt(std::max(0.0, s.spectral_value));
    s.margin = std::numeric_limits<double>::infinity();
    const long base = std::max(1L, static_cast<long>(std::floor(root)));
    for (long m = std::max(1L, base - 1); m <= base + 1; ++m) {
        const double d = std::abs(s.spectral_value - static_cast<double>(m * m));
        if (d < s.margin) {
            s.margin = d;
            s.nearest_mode = static_cast<int>(m);
        }
    }
    s.resonant = s.margin <= resonance_tol * std::max(1.0, std::abs(s.spectral_value));
    return s;
}

StabilityReport stability_and_spectrum(const RevolutionSurface& s, double r, double resonance_tol)
{
    return stability_and_spectrum(s.f(r), resonance_tol);
}

}  // namespace isoprofile::revolution
