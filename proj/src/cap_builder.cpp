#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace isoprofile::revolution {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// I^2 on [0, delta] obtained by integrating a continuous piecewise-linear (I^2)''
struct PiecewiseCubic {
    std::vector<double> x, h, psi, y;

    PiecewiseCubic(std::vector<double> knots, std::vector<double> hv) : x(std::move(knots)), h(std::move(hv))
    {
        psi.assign(x.size(), 0.0);
        y.assign(x.size(), 0.0);
        psi[0] = four_pi;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double L = x[i + 1] - x[i];
            psi[i + 1] = psi[i] + L * (h[i] + h[i + 1]) / 2.0;
            y[i + 1] = y[i] + psi[i] * L + L * L * (2.0 * h[i] + h[i + 1]) / 6.0;
        }
    }

    Jet eval(double v) const
    {
        std::size_t i = 0;
        while (i + 2 < x.size() && v > x[i + 1])
            ++i;
        const double len = x[i + 1] - x[i];
        const double m = len > 0 ? (h[i + 1] - h[i]) / len : 0.0;
        const double L = v - x[i];
        return {y[i] + psi[i] * L + h[i] * L * L / 2.0 + m * L * L * L / 6.0, psi[i] + h[i] * L + m * L * L / 2.0,
                h[i] + m * L};
    }
};

struct Shape {
    double ramp, gamma, mu;
};

std::optional<PiecewiseCubic> candidate(double delta, double k, const Shape& s, double psi_b)
{
    const double a = (four_pi - psi_b) / (k * (2.0 + s.ramp));
    const double b = a * (1.0 + s.ramp);
    if (!(a > 0.0) || !(b < delta))
        return std::nullopt;
    const double c = b + s.gamma * (delta - b);
    const double p = c + s.mu * (delta - c);
    const double H = 2.0 * (2.0 * delta - psi_b - (delta - p)) / (delta - c);
    return PiecewiseCubic({0.0, a, b, c, p, delta}, {-2.0 * k, -2.0 * k, 0.0, 0.0, H, 2.0});
}

// first failing property, empty if all hold
std::string first_violation(const PiecewiseCubic& pc, double delta, double k)
{
    for (double hv : pc.h)
        if (hv < -2.0 * k * (1 + 1e-12))
            return "(I_S^2)'' >= -2k";
    const std::size_t n = 20000;
    std::vector<double> grid;
    for (std::size_t i = 0; i <= n; ++i)
        grid.push_back(delta * static_cast<double>(i) / static_cast<double>(n));
    grid.insert(grid.end(), pc.x.begin(), pc.x.end());
    std::sort(grid.begin(), grid.end());
    for (double v : grid) {
        const Jet j = pc.eval(v);
        if (j.d1 < -1e-12 * four_pi)
            return "I_S nondecreasing";
    }
    for (double v : grid) {
        if (v <= 0.0)
            continue;
        const Jet j = pc.eval(v);
        const double d = 2.0 * j.value - v * j.d1;
        if (d < -1e-12 * (2.0 * std::abs(j.value) + v * std::abs(j.d1)))
            return "I_S(v)/v nonincreasing";
    }
    for (double v : grid) {
        const double lb = four_pi * v - k * v * v;
        if (lb > 0.0 && pc.eval(v).value < lb - 1e-12 * four_pi * v)
            return "I_S(v) >= sqrt(4 pi v - k v^2)";
    }
    return {};
}

}  // namespace

std::pair<CapDesign, ProfileFunction> cap_profile(double delta, double k, double alpha)
{
    if (!(delta > 0.0) || !(delta < alpha))
        throw BadParameters("cap needs 0 < delta < alpha");
    if (!(k > 0.0))
        throw BadParameters("cap needs k > 0");

    const double lb_delta = four_pi * delta - k * delta * delta;
    if (lb_delta > delta * delta * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "I_S(v) >= sqrt(4 pi v - k v^2): the bound exceeds I_S(delta) = delta; needs k >= "
            << four_pi / delta - 1.0;
        throw ConstraintViolation(msg.str());
    }
    const double equator = 2.0 * std::numbers::pi / k;
    if (equator <= delta && four_pi * equator - k * equator * equator > delta * delta * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "I_S nondecreasing: a nondecreasing I_S with I_S(delta) = delta cannot stay above the bound "
               "maximum 2 pi / sqrt(k); needs k >= "
            << four_pi * std::numbers::pi / (delta * delta);
        throw ConstraintViolation(msg.str());
    }

    const std::vector<Shape> shapes = {
        {0.5, 0.5, 0.8},  {0.5, 0.3, 0.8},  {0.5, 0.7, 0.8},  {0.5, 0.5, 0.6},  {0.5, 0.5, 0.9},
        {0.25, 0.5, 0.8}, {1.0, 0.5, 0.8},  {0.5, 0.15, 0.8}, {0.5, 0.85, 0.8}, {0.5, 0.3, 0.6},
        {0.5, 0.7, 0.9},  {0.25, 0.3, 0.9}, {1.0, 0.7, 0.6},  {0.5, 0.5, 0.4},
    };
    std::string first_failure;
    for (const auto& shape : shapes) {
        auto residual = [&](double psi_b) -> std::optional<double> {
            auto pc = candidate(delta, k, shape, psi_b);
            if (!pc)
                return std::nullopt;
            return pc->y.back() - delta * delta;
        };
        const int scan = 400;
        std::optional<double> prev;
        double prev_x = 0.0;
        for (int i = 1; i < scan; ++i) {
            const double x = four_pi * static_cast<double>(i) / scan;
            const auto r = residual(x);
            if (r && prev && ((*r <= 0.0) != (*prev <= 0.0))) {
                double lo = prev_x, hi = x;
                const bool lo_neg = *prev <= 0.0;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const auto rm = residual(mid);
                    if (!rm)
                        break;
                    if ((*rm <= 0.0) == lo_neg)
                        lo = mid;
                    else
                        hi = mid;
                }
                auto pc = candidate(delta, k, shape, 0.5 * (lo + hi));
                if (pc && std::abs(pc->y.back() - delta * delta) <= 1e-10 * delta * delta) {
                    const std::string why = first_violation(*pc, delta, k);
                    if (why.empty()) {
                        CapDesign d;
                        d.delta = delta;
                        d.k = k;
                        d.alpha = alpha;
                        d.knots = pc->x;
                        d.h = pc->h;
                        d.psi = pc->psi;
                        d.i2 = pc->y;
                        d.ramp = shape.ramp;
                        d.gamma = shape.gamma;
                        d.mu = shape.mu;
                        const PiecewiseCubic poly = *pc;
                        auto jet = [poly, delta](double v) {
                            if (v >= delta)
                                return Jet{v * v, 2.0 * v, 2.0};
                            return poly.eval(v);
                        };
                        auto ratio = [poly, delta](double v) {
                            if (v >= delta)
                                return 1.0;
                            return std::sqrt(std::max(0.0, poly.eval(v).value)) / v;
                        };
                        std::ostringstream name;
                        name << "cap(delta=" << delta << ",k=" << k << ",alpha=" << alpha << ")";
                        auto profile = ProfileFunction::from_closed_form(
                            jet, std::numeric_limits<double>::infinity(), 2.0 * alpha, name.str(), ratio);
                        return {d, profile};
                    }
                    if (first_failure.empty())
                        first_failure = why;
                }
            }
            if (r) {
                prev = r;
                prev_x = x;
            }
        }
    }
    if (first_failure.empty())
        first_failure = "C2 interpolant matching (0, 4 pi, -2k) and (delta^2, 2 delta, 2)";
    throw ConstraintViolation(first_failure + ": no admissible interpolant for delta=" + std::to_string(delta) +
                              ", k=" + std::to_string(k));
}

Cap build_cap(double delta, double k, double alpha, const MetricOptions& opt)
{
    auto [design, profile] = cap_profile(delta, k, alpha);
    MetricOptions m = opt;
    if (!(m.v_end > 0.0))
        m.v_end = 2.0 * alpha;
    Cap cap{design, profile, {}};
    cap.surface = metric_from_profile(profile, m);
    return cap;
}

}  // namespace isoprofile::revolution
