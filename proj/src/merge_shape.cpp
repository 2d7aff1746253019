#include "isoprofile/errors.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isoprofile::revolution {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

MergeResult merge_profiles(const std::vector<ProfileFunction>& caps, const ProfileFunction& ambient, int m,
                           double delta, double alpha)
{
    if (caps.empty() || m < 1 || static_cast<std::size_t>(m) != caps.size())
        throw BadParameters("merge needs m caps");
    if (!(delta > 0.0) || !(delta < alpha / m))
        throw BadParameters("merge needs 0 < delta < alpha / m");
    const double seam = m * delta;
    const double top = m * alpha;

    const std::size_t n = 4000;
    std::vector<double> grid;
    for (std::size_t i = 1; i <= n; ++i)
        grid.push_back(top * static_cast<double>(i) / static_cast<double>(n));
    grid.push_back(seam);
    std::sort(grid.begin(), grid.end());

    for (std::size_t j = 0; j < caps.size(); ++j) {
        const std::string tag = " (cap " + std::to_string(j) + ")";
        double prev_i = 0.0, prev_r = std::numeric_limits<double>::infinity();
        for (double v : grid) {
            const double iv = caps[j].value(v);
            const double rv = iv / v;
            if (iv < prev_i * (1 - 1e-12))
                throw HypothesisFailure("I_S nondecreasing" + tag);
            if (rv > prev_r * (1 + 1e-12))
                throw HypothesisFailure("I_S(v)/v nonincreasing" + tag);
            prev_i = iv;
            prev_r = rv;
        }
    }
    double prev = 0.0;
    for (double v : grid) {
        if (v < seam)
            continue;
        const double im = ambient.value(v);
        if (im < prev * (1 - 1e-12))
            throw HypothesisFailure("I_M nondecreasing");
        prev = im;
        for (std::size_t j = 0; j < caps.size(); ++j)
            if (std::abs(caps[j].value(v) - im) > 1e-9 * im)
                throw HypothesisFailure("I_M = I_S on [m delta, m alpha] (cap " + std::to_string(j) + ")");
    }

    MergeResult r;
    // dominant cap: below every other one everywhere, strictly somewhere
    for (std::size_t j = 0; j < caps.size() && !r.dominant_cap; ++j) {
        bool below = true, strict = false;
        for (double v : grid) {
            if (v > seam)
                break;
            for (std::size_t o = 0; o < caps.size(); ++o) {
                if (o == j)
                    continue;
                const double a = caps[j].value(v), b = caps[o].value(v);
                if (a > b * (1 + 1e-14))
                    below = false;
                if (a < b * (1 - 1e-12))
                    strict = true;
            }
        }
        if (below && (strict || caps.size() == 1))
            r.dominant_cap = j;
    }
    r.unique_minimizer = r.dominant_cap.has_value();
    for (double v : grid) {
        if (v > seam)
            break;
        std::size_t best = 0;
        for (std::size_t j = 1; j < caps.size(); ++j)
            if (caps[j].value(v) < caps[best].value(v))
                best = j;
        r.grid.push_back(v);
        r.minimizer.push_back(r.dominant_cap.value_or(best));
    }

    auto merged_jet = [caps, ambient, seam](double v) {
        if (v >= seam)
            return ambient.i2(v);
        std::size_t best = 0;
        for (std::size_t j = 1; j < caps.size(); ++j)
            if (caps[j].value(v) < caps[best].value(v))
                best = j;
        return caps[best].i2(v);
    };
    auto merged_ratio = [caps, ambient, seam](double v) {
        if (v >= seam)
            return ambient.ratio(v);
        double best = caps[0].ratio(v);
        for (std::size_t j = 1; j < caps.size(); ++j)
            best = std::min(best, caps[j].ratio(v));
        return best;
    };
    r.merged = ProfileFunction::from_closed_form(merged_jet, ambient.v_max(), top, "merged", merged_ratio);
    return r;
}

ShapeReport shape_predicates(const ScalarProfile& F, const std::vector<double>& grid)
{
    ShapeReport r;
    r.ratio_nonincreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double v : grid) {
        if (v <= 0.0)
            continue;
        const double q = F(v) / v;
        if (q > prev * (1 + 1e-12) + 1e-300)
            r.ratio_nonincreasing = false;
        prev = q;
    }
    r.subadditive_certificate = r.ratio_nonincreasing;
    if (!r.ratio_nonincreasing) {
        // look for F(v + v') > F(v) + F(v'), trying v = v' = 1 first
        std::vector<double> probes{1.0};
        probes.insert(probes.end(), grid.begin(), grid.end());
        for (double v : probes) {
            if (v <= 0.0)
                continue;
            const double lhs = F(2.0 * v), rhs = 2.0 * F(v);
            if (lhs > rhs * (1 + 1e-12)) {
                r.counterexample = std::array<double, 4>{v, v, lhs, rhs};
                break;
            }
        }
        if (!r.counterexample) {
            for (std::size_t i = 0; i < grid.size() && !r.counterexample; ++i)
                for (std::size_t j = i; j < grid.size(); ++j) {
                    const double a = grid[i], b = grid[j];
                    if (a <= 0.0)
                        continue;
                    const double lhs = F(a + b), rhs = F(a) + F(b);
                    if (lhs > rhs * (1 + 1e-12)) {
                        r.counterexample = std::array<double, 4>{a, b, lhs, rhs};
                        break;
                    }
                }
        }
    }
    return r;
}

ScalarProfile min_of(ScalarProfile f, ScalarProfile g)
{
    return [f = std::move(f), g = std::move(g)](double v) { return std::min(f(v), g(v)); };
}

ScalarProfile splice(ScalarProfile f, ScalarProfile g, double delta)
{
    return [f = std::move(f), g = std::move(g), delta](double v) { return v <= delta ? f(v) : g(v); };
}

double max_subadditivity_defect(const ScalarProfile& F, double v_max, std::size_t pairs, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, v_max / 2.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs; ++i) {
        double a = u(rng), b = u(rng);
        if (a <= 0.0 || b <= 0.0)
            continue;
        worst = std::max(worst, F(a + b) - F(a) - F(b));
    }
    return worst;
}

double bol_fiala(double k, double v)
{
    const double s = four_pi * v - k * v * v;
    if (s < 0.0 || v < 0.0)
        throw DomainError("4 pi v - k v^2 < 0 at v=" + std::to_string(v));
    return std::sqrt(s);
}

double bol_fiala_floor(double k, double v)
{
    return std::sqrt(std::max(0.0, four_pi * v - k * v * v));
}

double small_volume_threshold(double k)
{
    return k > 0.0 ? 2.0 * std::numbers::pi / k : std::numeric_limits<double>::infinity();
}

double ultrahyperbolic_rho(double a, double length)
{
    if (!(a >= 0.0) || !(length > 0.0))
        throw DomainError("ultrahyperbolic constant needs a >= 0 and L > 0");
    const double x = 4.0 / length * std::acosh(1.0 + a / (2.0 * std::numbers::pi));
    return -x * x;
}

}  // namespace isoprofile::revolution
