#include "isoprofile/conformal_forge.hpp"

#include "isoprofile/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace isoprofile::conformal {

using revolution::ProfileFunction;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

}  // namespace

double ConformalSolution::rhs(double s, double t) const
{
    // dt/ds = V (t / I(V))^p with I = V ratio(V)
    const double r = profile_.ratio(std::exp(s));
    return t * std::exp((p_ - 1.0) * (std::log(t) - s) - p_ * std::log(r));
}

double ConformalSolution::psi_rhs(double s) const
{
    const double r = profile_.ratio(std::exp(s));
    return -q_ * std::exp(-q_ * s) * std::expm1(-p_ * std::log(r));
}

double ConformalSolution::phi_rhs(double s) const
{
    const double r = profile_.ratio(std::exp(s));
    return q_ * std::exp(-q_ * s - p_ * std::log(r));
}

const ConformalSolution::Chunk& ConformalSolution::chunk(double s) const
{
    auto it = std::upper_bound(chunks_.begin(), chunks_.end(), s, [](double x, const Chunk& c) { return x < c.s0; });
    if (it != chunks_.begin())
        --it;
    return *it;
}

double ConformalSolution::psi_at(double s) const
{
    const auto& c = chunk(s);
    return c.psi_base + c.ode.value(s);
}

double ConformalSolution::t_at(double s) const
{
    return std::exp(-std::log(std::exp(-q_ * s) + psi_at(s)) / q_);
}

double ConformalSolution::dt_ds(double s) const
{
    // t^{-q} = V^{-q} + psi
    const double t = t_at(s);
    return std::exp((1.0 + q_) * std::log(t)) * chunk(s).slope.derivative(s) / q_;
}

double ConformalSolution::sigma_at(double s) const
{
    if (!tau_)
        return inf_v;
    const auto& c = chunk(s);
    // t^{-q} - tau^{-q}, with the psi increments summed forward
    const double ahead = c.suffix + (c.ode.y_end() - c.ode.value(s));
    const double d = (std::exp(-q_ * s) - remainder_) - ahead;
    return -*tau_ * std::expm1(-std::log1p(d / deficit_) / q_);
}

double ConformalSolution::tail(double log_v) const
{
    // v = V e^x
    const double body = integrate_to_infinity(
        [&](double x) {
            const double r = profile_.ratio(std::exp(log_v + x));
            return std::exp((1.0 - p_) * x - p_ * std::log(r));
        },
        0.0, 1e-13);
    return std::exp((1.0 - p_) * log_v) * body;
}

double ConformalSolution::identity_lhs(double sigma) const
{
    if (!tau_)
        return inf_v;
    const double tau = *tau_;
    return (n_ - 1) * std::pow(tau, -q_) * std::expm1(-q_ * std::log1p(-sigma / tau));
}

double ConformalSolution::log_volume_at_gap(double sigma) const
{
    if (!tau_)
        throw NoBlowup("no finite blow-up level");
    const double s0 = chunks_.front().s0;
    if (sigma >= *tau_ - t0_)
        return s0;
    if (sigma >= sigma_end_)
        return find_root([&](double s) { return sigma_at(s) - sigma; }, s0, s_end_);
    const double target = std::log(identity_lhs(sigma));
    const double hi = std::log(opt_.v_continue) + 1.0;
    return find_root([&](double lv) { return std::log(tail(lv)) - target; }, s_end_, hi);
}

ConformalPoint ConformalSolution::make_point(double s, double t, double sigma, bool continued) const
{
    ConformalPoint p;
    p.t = t;
    p.sigma = sigma;
    p.V = std::exp(s);
    p.continued = continued;
    const double lr = std::log(profile_.ratio(p.V));
    if (!continued) {
        const double lts = std::log(dt_ds(s));
        // V' = V / (dt/ds)
        p.f = std::exp((s - lts) / n_);
        p.residual = std::abs(std::expm1((s - lts) / p_ + std::log(t) - s - lr));
    } else {
        p.f = std::exp(q_ * (s + lr - std::log(t)));
        p.residual = nan_v;
    }
    p.K = -0.5 * profile_.i2(p.V).d2;
    return p;
}

ConformalPoint ConformalSolution::point_at_log_volume(double s) const
{
    if (s <= s_end_)
        return make_point(s, t_at(s), sigma_at(s), false);
    if (!tau_)
        throw DomainError("log volume beyond the forward range");
    const double lhs = std::exp(std::log(tail(s)));
    // invert the identity for the gap
    const double tau = *tau_;
    const double x = lhs / ((n_ - 1) * std::pow(tau, -q_));
    const double sigma = -tau * std::expm1(-std::log1p(x) / q_);
    return make_point(s, tau - sigma, sigma, true);
}

ConformalSolution conformal_solve(const ProfileFunction& profile, int n, double t0, const SolveOptions& opt)
{
    if (n < 2)
        throw BadParameters("dimension must be at least 2");
    if (!(t0 > 0.0))
        throw BadParameters("seam level t0 must be positive");
    if (!std::isinf(profile.v_max()))
        throw BadParameters("profile must be defined on [0, inf)");
    if (!(opt.v_ceiling > t0) || !(opt.v_continue >= opt.v_ceiling) || !(opt.chunk > 0.0))
        throw BadParameters("need t0 < v_ceiling <= v_continue and a positive chunk");
    for (int k = 1; k <= 16; ++k) {
        const double v = t0 * k / 16.0;
        if (std::abs(profile.value(v) - v) > 1e-10 * v)
            throw BadParameters("profile must equal v on [0, t0]; I(" + format_double(v) +
                                ") = " + format_double(profile.value(v)));
    }
    if (!profile.convex())
        throw NonConvexProfile("profile '" + profile.name() + "' is not convex");

    ConformalSolution sol;
    sol.n_ = n;
    sol.p_ = static_cast<double>(n) / (n - 1);
    sol.q_ = 1.0 / (n - 1);
    sol.t0_ = t0;
    sol.opt_ = opt;
    sol.profile_ = profile;

    const double s0 = std::log(t0);
    sol.s_end_ = std::log(opt.v_ceiling);
    const auto count = static_cast<std::size_t>(std::ceil((sol.s_end_ - s0) / opt.chunk));
    double psi = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = s0 + (sol.s_end_ - s0) * static_cast<double>(k) / count;
        const double b = k + 1 == count ? sol.s_end_ : s0 + (sol.s_end_ - s0) * static_cast<double>(k + 1) / count;
        DenseOde::Options o;
        o.rtol = opt.rtol;
        // psi errors measured against the size of V^{-q} on the chunk
        o.atol = 1e-5 * opt.rtol * std::exp(-sol.q_ * b);
        ConformalSolution::Chunk c;
        c.s0 = a;
        c.psi_base = psi;
        c.ode = DenseOde::integrate([&sol](double s, double) { return sol.psi_rhs(s); }, a, 0.0, b, o);
        o.atol = 1e-5 * opt.rtol * sol.phi_rhs(b) * (b - a);
        c.slope = DenseOde::integrate([&sol](double s, double) { return sol.phi_rhs(s); }, a, 0.0, b, o);
        psi += c.ode.y_end();
        sol.chunks_.push_back(std::move(c));
    }
    double acc = 0.0;
    for (auto it = sol.chunks_.rbegin(); it != sol.chunks_.rend(); ++it) {
        it->suffix = acc;
        acc += it->ode.y_end();
    }
    sol.t_end_ = sol.t_at(sol.s_end_);

    const double tail_end = sol.tail(sol.s_end_);
    if (!std::isfinite(tail_end))
        throw NoBlowup("int I^{-n/(n-1)} diverges");
    // psi(inf) - psi(s_end) = q int_{V_end}^inf (v^{-p} - I^{-p}) dv, v = V_end e^x
    const double body = integrate_to_infinity(
        [&](double x) {
            const double r = profile.ratio(std::exp(sol.s_end_ + x));
            return -std::exp(-sol.q_ * x) * std::expm1(-sol.p_ * std::log(r));
        },
        0.0, 1e-13);
    sol.remainder_ = sol.q_ * std::exp(-sol.q_ * sol.s_end_) * body;
    sol.deficit_ = psi + sol.remainder_;
    // I = v on [0, t0] and convex means I >= v, so psi never decreases; tau^{-q} = psi(inf)
    if (sol.deficit_ > 1e-14 * std::pow(t0, -sol.q_)) {
        sol.tau_ = std::exp(-std::log(sol.deficit_) / sol.q_);
        sol.sigma_end_ = sol.sigma_at(sol.s_end_);
    }

    if (sol.tau_) {
        // geometric in the gap: tau - (tau - t0) 2^{-j}
        const double width = *sol.tau_ - t0;
        const double floor_lhs = sol.tail(std::log(opt.v_continue));
        for (int j = 0; j < 4000; ++j) {
            const double sigma = std::ldexp(width, -j);
            const bool continued = sigma < sol.sigma_end_;
            if (continued && sol.identity_lhs(sigma) < floor_lhs)
                break;
            const double s = sol.log_volume_at_gap(sigma);
            if (!continued)
                sol.grid_.push_back(sol.make_point(s, sol.t_at(s), sol.sigma_at(s), false));
            else
                sol.grid_.push_back(sol.make_point(s, *sol.tau_ - sigma, sigma, true));
        }
    } else {
        const std::size_t m = 200;
        for (std::size_t i = 0; i <= m; ++i) {
            const double s = s0 + (sol.s_end_ - s0) * static_cast<double>(i) / m;
            sol.grid_.push_back(sol.make_point(s, sol.t_at(s), inf_v, false));
        }
    }
    return sol;
}

std::string ConformalSolution::to_csv() const
{
    std::string out = "t,V,f,K,sigma,continued\n";
    char buf[256];
    for (const auto& p : grid_) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", p.t, p.V, p.f, p.K, p.sigma,
                      p.continued ? 1 : 0);
        out += buf;
    }
    return out;
}

Json ConformalSolution::to_json() const
{
    Json j = Json::object();
    j["profile"] = profile_.name();
    j["n"] = n_;
    j["t0"] = t0_;
    j["tau"] = tau_ ? Json(*tau_) : Json("inf");
    j["v_ceiling"] = opt_.v_ceiling;
    j["t_at_ceiling"] = t_end_;
    j["sigma_at_ceiling"] = json_number(tau_ ? sigma_end_ : inf_v);
    j["points"] = grid_.size();
    std::size_t cont = 0;
    for (const auto& p : grid_)
        cont += p.continued;
    j["continued_points"] = cont;
    return j;
}

VerificationReport verify_solution(const ConformalSolution& sol)
{
    VerificationReport r("conformal solution");
    const auto& g = sol.grid();
    const auto& first = g.front();
    r.add("V(t0) = t0", std::abs(first.V - sol.t0()) <= 1e-13 * sol.t0(), std::abs(first.V - sol.t0()), 1e-13);
    r.add("seam f(t0) = 1", std::abs(first.f - 1.0) <= 1e-8, std::abs(first.f - 1.0), 1e-8);

    bool increasing = true;
    for (std::size_t i = 1; i < g.size(); ++i)
        increasing = increasing && g[i].V > g[i - 1].V && !(g[i].t < g[i - 1].t);
    r.add("V strictly increasing", increasing);

    // residual on every step boundary and midpoint of the forward solve
    double worst = 0.0;
    double at = sol.s_begin();
    const double s0 = sol.s_begin(), s1 = sol.s_end();
    const std::size_t m = 20000;
    for (std::size_t i = 0; i <= 2 * m; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / (2 * m);
        const auto p = sol.point_at_log_volume(s);
        if (p.residual > worst) {
            worst = p.residual;
            at = s;
        }
    }
    for (const auto& p : g)
        if (!p.continued && p.residual > worst)
            worst = p.residual;
    r.add("ODE residual", worst < 1e-8, worst, 1e-8, "worst near log V = " + format_double(at));

    bool h_mono = true;
    double prev = -inf_v;
    for (const auto& p : g) {
        const double h = sol.profile().derivative(p.V);
        h_mono = h_mono && h >= prev * (1 - 1e-12) - 1e-15;
        prev = h;
    }
    r.add("density I'(V(t)) nondecreasing", h_mono);

    if (sol.tau()) {
        double err = 0.0;
        for (const auto& p : g) {
            if (p.continued)
                continue;
            const double lhs = sol.identity_lhs(p.sigma);
            const double rhs = sol.tail(std::log(p.V));
            err = std::max(err, std::abs(lhs - rhs) / rhs);
        }
        r.add("blow-up identity", err < 1e-6, err, 1e-6, "tau = " + format_double(*sol.tau()));
    } else {
        r.add("no finite blow-up", true, sol.t_at(sol.s_end()), 0.0, "t grows with V up to the ceiling");
    }
    return r;
}

VerificationReport asymptotic_diagnostics(const ConformalSolution& sol)
{
    VerificationReport r("v log v asymptotics");
    if (sol.n() != 2 || !sol.tau()) {
        r.add("finite blow-up with n = 2", false);
        return r;
    }
    const double tau = *sol.tau();
    const auto& g = sol.grid();
    auto log_x = [&](double t, double sigma) { return std::log(t) + std::log(tau) - std::log(sigma); };

    // (i) f against X / (t log X)
    auto ratio = [&](const ConformalPoint& p) {
        const double lx = log_x(p.t, p.sigma);
        return std::exp(std::log(p.f) + std::log(p.t) + std::log(lx) - lx);
    };
    double last_sigma = g.back().sigma;
    double worst = 0.0;
    Json decade = Json::array();
    for (const auto& p : g) {
        if (p.sigma > 10.0 * last_sigma)
            continue;
        const double q = ratio(p);
        worst = std::max(worst, std::abs(q - 1.0));
        decade.push_back(Json::array({p.sigma, p.V, q}));
    }
    r.add("f / asymptote on the final decade", worst <= 0.05, worst, 0.05,
          "last log10 V = " + format_double(std::log10(g.back().V)));
    r.data()["final_decade"] = std::move(decade);
    for (auto it = g.rbegin(); it != g.rend(); ++it)
        if (!it->continued) {
            r.data()["ratio_at_forward_ceiling"] = ratio(*it);
            r.data()["forward_ceiling_V"] = it->V;
            break;
        }

    // (ii) partial completeness integrals int_{t0}^{tau - 10^-j} f/t dt
    const double s0 = sol.s_begin();
    auto partial = [&](double s_hi) {
        // f/t dt = (e^s / t_s)^{1/2} t_s / t ds
        return integrate(
            [&](double s) {
                const double ts = sol.dt_ds(s);
                return std::exp(0.5 * s) * std::sqrt(ts) / sol.t_at(s);
            },
            s0, s_hi, 1e-12);
    };
    auto oracle = [&](double s_hi) {
        return integrate([&](double lv) { return 1.0 / sol.profile().ratio(std::exp(lv)); }, s0, s_hi, 1e-13);
    };
    std::vector<double> pj, lj;
    Json cuts = Json::array();
    double match = 0.0;
    for (int j = 2; j <= 6; ++j) {
        const double sigma = std::pow(10.0, -j);
        if (!(sigma < tau - sol.t0()))
            continue;
        const double s = sol.log_volume_at_gap(sigma);
        const double pv = partial(s);
        const double ov = oracle(s);
        match = std::max(match, std::abs(pv - ov) / ov);
        pj.push_back(pv);
        lj.push_back(std::log(log_x(tau - sigma, sigma)));
        cuts.push_back(Json::array({j, pv, lj.back()}));
    }
    bool increasing = pj.size() >= 2;
    double rate = 0.0;
    for (std::size_t i = 1; i < pj.size(); ++i) {
        increasing = increasing && pj[i] > pj[i - 1];
        const double q = (pj[i] - pj[i - 1]) / (lj[i] - lj[i - 1]);
        rate = std::max(rate, std::abs(std::log2(q)));
    }
    r.add("partial integrals strictly increasing", increasing, static_cast<double>(pj.size()));
    r.add("increments within a factor 2 of log log X", increasing && rate <= 1.0, rate, 1.0, "max |log2 ratio|");
    r.add("partial integrals match int dV/I", match < 1e-6, match, 1e-6);
    r.data()["partial_integrals"] = std::move(cuts);

    // (iii) curvature K = -(L^2 + 3L + 1), L = log(V / t0), where I = V L
    double formula_err = 0.0;
    bool below = false;
    bool mono = true;
    double prev = inf_v;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& p = g[i];
        const double L = std::log(p.V / sol.t0());
        if (p.V >= 5.0 * sol.t0()) {
            const double k = -(L * L + 3.0 * L + 1.0);
            formula_err = std::max(formula_err, std::abs(p.K - k) / std::abs(k));
        }
        if (i + 1 < g.size() && p.K < -100.0)
            below = true;
        mono = mono && p.K <= prev * (1 - 1e-12) + 1e-12;
        prev = p.K;
    }
    r.add("K = -(L^2 + 3L + 1)", formula_err < 1e-9, formula_err, 1e-9);
    r.add("K < -100 before the last point", below, g.back().K, -100.0);
    r.add("K nonincreasing", mono);
    return r;
}

VanishingChoices default_vanishing()
{
    VanishingChoices c;
    c.v = [](double t) { return 2.0 * std::numbers::pi * t; };
    c.u = [](double t) { return 1.0 / ((1.0 + t * t) * 2.0 * std::numbers::pi * t); };
    c.h = [](double t) { return 1.0 + t * t; };
    c.uv = [](double t) { return 1.0 / (1.0 + t * t); };
    c.defaults = true;
    return c;
}

Json VanishingConstruction::to_json() const
{
    Json j = Json::object();
    Json bs = Json::array();
    for (const auto& b : bands) {
        Json jb = Json::object();
        jb["volume_target"] = b.target.volume;
        jb["epsilon"] = json_number(b.target.epsilon);
        jb["s"] = b.s;
        jb["t"] = b.t;
        jb["volume_bound"] = b.volume_bound;
        jb["volume"] = json_number(b.volume);
        jb["boundary"] = b.boundary;
        bs.push_back(std::move(jb));
    }
    j["bands"] = std::move(bs);
    return j;
}

VanishingConstruction vanishing_profile_construction(const std::vector<VanishingTarget>& targets,
                                                     const VanishingChoices& ch)
{
    if (!ch.v || !ch.u || !ch.h)
        throw BadParameters("vanishing construction needs v, u and h");
    auto uv = ch.uv ? ch.uv : [&ch](double t) { return ch.u(t) * ch.v(t); };
    auto huv = [&](double t) { return ch.h(t) * uv(t); };

    VanishingConstruction out;
    if (ch.defaults) {
        out.report.add("u v -> 0", true, uv(1e6), 0.0, "u v = 1/(1+t^2)");
        out.report.add("int h = inf", true, 0.0, 0.0, "h(t) = 1 + t^2 >= 1");
    } else {
        out.report.add("int h = inf", false, 0.0, 0.0, "custom h: not certified");
    }

    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& tg = targets[k];
        if (!(tg.volume > 0.0) || !(tg.epsilon > 0.0))
            throw BadParameters("targets need positive volume and epsilon");
        VanishingBand b;
        b.target = tg;
        if (ch.defaults) {
            // 1/(1+s^2) = eps/2
            b.s = tg.epsilon >= 2.0 ? 0.0 : std::sqrt(2.0 / tg.epsilon - 1.0);
            b.t = b.s + tg.volume;
        } else {
            bool found = false;
            for (int e = 0; e <= 90 && !found; ++e) {
                const double s = std::ldexp(1e-3, e);
                if (uv(s) <= tg.epsilon / 2) {
                    b.s = s;
                    found = true;
                }
            }
            if (!found)
                throw TargetUnreachable("u v does not fall below " + format_double(tg.epsilon / 2));
            double step = tg.volume;
            int guard = 0;
            while (integrate(huv, b.s, b.s + step, 1e-12) < tg.volume || uv(b.s + step) > tg.epsilon - uv(b.s)) {
                step *= 2;
                if (++guard > 200)
                    throw TargetUnreachable("no band of volume " + format_double(tg.volume));
            }
            b.t = b.s + step;
        }
        b.volume_bound = integrate(huv, b.s, b.t, 1e-13);
        b.volume = b.s > 0.0 ? integrate(
                                   [&](double t) {
                                       const double u = ch.u(t), h = ch.h(t);
                                       return uv(t) * std::sqrt(u * u + h * h);
                                   },
                                   b.s, b.t, 1e-12)
                             : inf_v;
        b.boundary = uv(b.s) + uv(b.t);
        const std::string tag = "band " + std::to_string(k);
        out.report.add(tag + " volume >= target", b.volume_bound >= tg.volume * (1 - 1e-12), b.volume_bound,
                       tg.volume);
        out.report.add(tag + " g'' volume >= bound", b.volume >= b.volume_bound * (1 - 1e-12), b.volume,
                       b.volume_bound);
        out.report.add(tag + " boundary <= epsilon", b.boundary <= tg.epsilon, b.boundary, tg.epsilon);
        out.bands.push_back(b);
    }
    out.report.data() = out.to_json();
    return out;
}

}  // namespace isoprofile::conformal
