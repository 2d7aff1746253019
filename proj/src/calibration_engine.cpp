#include "isoprofile/calibration_engine.hpp"

#include "isoprofile/errors.hpp"
#include "isoprofile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace isoprofile::calibration {

using cusp_assembly::SingularSurface;
using revolution::RevolutionSurface;

double calibration_lower_bound(double c, double v)
{
    return c * v;
}

CalibrationBound calibration_lower_bound(double c, double v, double calibrated_length, double rel_tol)
{
    CalibrationBound b;
    b.bound = c * v;
    b.equality = std::abs(calibrated_length - b.bound) <= rel_tol * std::max(1.0, std::abs(b.bound));
    return b;
}

double ball_lower_bound(int n, double rho, double v)
{
    return (n - 1) * rho * v;
}

double cusp_profile(int n, double v)
{
    return (n - 1) * v;
}

Json RearrangementResult::to_json() const
{
    Json j = Json::object();
    j["r0"] = r0;
    j["level"] = json_number(level);
    j["area"] = area;
    j["integral"] = integral;
    j["boundary_length"] = boundary_length;
    j["sandwich"] = sandwich;
    j["equality"] = equality;
    j["defect"] = defect;
    return j;
}

std::function<double(double)> log_derivative_density(const RevolutionSurface& s)
{
    return [s](double r) {
        const Jet j = s.f(r);
        return j.d1 / j.value;
    };
}

RearrangementResult rearrangement_bound(const RevolutionSurface& s, const std::function<double(double)>& u, double r0,
                                        double tol)
{
    if (!(r0 > s.r_begin() && r0 <= s.r_end()))
        throw DomainError("r0 must lie in (r_begin, r_end]");
    RearrangementResult out;
    out.r0 = r0;
    out.level = u(r0);
    if (!std::isfinite(out.level))
        throw DomainError("density is not finite at r0");

    // V = {r <= r0} must sit between {u < level} and {u <= level}
    const std::size_t samples = 4000;
    const double slack = 1e-12 * std::max(1.0, std::abs(out.level));
    for (std::size_t i = 0; i <= samples; ++i) {
        const double r = s.r_begin() + (s.r_end() - s.r_begin()) * static_cast<double>(i) / samples;
        const double x = u(r);
        if (std::isnan(x))
            continue;
        if (r < r0 && x > out.level + slack)
            throw NotSublevel("u(" + format_double(r) + ") = " + format_double(x) + " exceeds the level " +
                              format_double(out.level) + " inside V");
        if (r > r0 && x < out.level - slack)
            throw NotSublevel("u(" + format_double(r) + ") = " + format_double(x) + " is below the level " +
                              format_double(out.level) + " outside V");
    }
    out.sandwich = true;

    const double below = s.nodes().front().area;
    out.area = s.area(r0);
    out.integral = below * u(s.r_begin()) + integrate(
                                                [&](double r) {
                                                    const double f = s.f(r).value;
                                                    return f == 0.0 ? 0.0 : 2.0 * std::numbers::pi * u(r) * f;
                                                },
                                                s.r_begin(), r0, 1e-13);
    out.boundary_length = 2.0 * std::numbers::pi * s.f(r0).value;
    if (!s.has_pole() && below == 0.0)
        out.boundary_length += 2.0 * std::numbers::pi * s.f(s.r_begin()).value;
    out.defect = std::abs(out.integral - out.boundary_length) / out.boundary_length;
    out.equality = out.defect <= tol;
    return out;
}

const char* family_name(FamilyKind k)
{
    switch (k) {
    case FamilyKind::sublevel:
        return "B";
    case FamilyKind::clearing_up:
        return "C";
    case FamilyKind::clearing_down:
        return "D";
    }
    return "?";
}

std::optional<Rational> CalibratedFamily::area_hi() const
{
    if (!p_hi)
        return std::nullopt;
    return area_at(*p_hi);
}

std::string compact(const Rational& q)
{
    if (mpz_sizeinbase(q.get_num_mpz_t(), 2) <= 96 && mpz_sizeinbase(q.get_den_mpz_t(), 2) <= 96)
        return to_string(q);
    if (q == 0)
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s2^%.6Lf", q < 0 ? "-" : "", log2_of(q < 0 ? Rational(-q) : q));
    return buf;
}

Json CalibratedFamily::to_json() const
{
    Json j = Json::object();
    j["kind"] = family_name(kind);
    if (piece)
        j["piece"] = *piece;
    j["parameter"] = Json::array({compact(p_lo), p_hi ? compact(*p_hi) : std::string("inf")});
    const auto hi = area_hi();
    j["area"] = Json::array({compact(area_lo()), hi ? compact(*hi) : std::string("inf")});
    j["slope"] = compact(a1);
    return j;
}

std::optional<ChainTerms> inequality_chain(const Rational& w, const Rational& c, const Rational& c_lower,
                                           const std::optional<Rational>& c_upper)
{
    if (!c_upper)
        return std::nullopt;
    const Rational& cu = *c_upper;
    ChainTerms t;
    const Rational half = Rational(1, 2);
    // C top: c/2 + w (c''/2 - c/2); D bottom: 2c - w (2c - 2c')
    t.exact = (c * half + w * (cu * half - c * half)) - (2 * c - w * (2 * c - 2 * c_lower));
    t.annulus = w * (cu * half - 2 * c_lower) - Rational(3, 2) * c;
    t.relaxed = Rational(3, 8) * w * cu - Rational(3, 2) * c;
    t.final = w * cu / 4 - 2 * c;
    for (Rational* x : {&t.exact, &t.annulus, &t.relaxed, &t.final})
        x->canonicalize();
    return t;
}

std::vector<Interval> uncovered(std::vector<Interval> closed, const Rational& lo, const Rational& hi)
{
    std::sort(closed.begin(), closed.end(), [](const Interval& a, const Interval& b) { return a.first < b.first; });
    std::vector<Interval> gaps;
    Rational reach = lo;
    for (const auto& [a, b] : closed) {
        if (b <= reach)
            continue;
        if (a > reach)
            gaps.emplace_back(reach, std::min(a, hi));
        reach = b;
        if (reach >= hi)
            break;
    }
    if (reach < hi)
        gaps.emplace_back(reach, hi);
    std::erase_if(gaps, [](const Interval& g) { return !(g.first < g.second); });
    return gaps;
}

namespace {

Json interval_json(const Interval& i)
{
    return Json::array({compact(i.first), compact(i.second)});
}

CriticalCoverage cover_critical(const SingularSurface& s, std::size_t k, const Rational& horizon)
{
    const auto& pt = s.singular_points()[k];
    CriticalCoverage cc;
    cc.point = k;
    cc.id = pt.id;
    cc.u = pt.u;
    const Rational c = pt.u.exact();
    const Rational lo = c / 2;
    const Rational hi = 2 * c;

    // spare component: the crossing edge with the largest w c'' (an anticusp wins), lowest index on ties
    const auto crossing = s.pieces_crossing(c);
    for (std::size_t i : crossing) {
        if (!cc.spare_piece) {
            cc.spare_piece = i;
            continue;
        }
        const auto& best = s.pieces()[*cc.spare_piece];
        const auto& cand = s.pieces()[i];
        if (best.upper.infinite)
            continue;
        if (cand.upper.infinite || cand.weight * cand.upper.value > best.weight * best.upper.value)
            cc.spare_piece = i;
    }

    std::vector<Interval> closed;
    if (cc.spare_piece) {
        const auto& p = s.pieces()[*cc.spare_piece];
        const Rational& w = p.weight;
        const Rational& cl = p.lower.value;
        const Rational below = s.sublevel_area(lo);
        const Rational above = s.sublevel_area(hi);

        CalibratedFamily up;
        up.kind = FamilyKind::clearing_up;
        up.p_lo = std::max(Rational(2 * cl), lo);
        if (!p.upper.infinite)
            up.p_hi = p.upper.value / 2;
        up.a1 = w;
        up.a0 = below - w * lo;
        up.piece = *cc.spare_piece;
        up.vertex = pt.vertex;
        up.critical = pt.u;

        CalibratedFamily down;
        down.kind = FamilyKind::clearing_down;
        down.p_lo = 2 * cl;
        down.p_hi = p.upper.infinite ? hi : std::min(hi, Rational(p.upper.value / 2));
        down.a1 = w;
        down.a0 = above - w * hi;
        down.piece = *cc.spare_piece;
        down.vertex = pt.vertex;
        down.critical = pt.u;

        for (const auto* f : {&up, &down}) {
            const auto top = f->area_hi();
            closed.emplace_back(f->area_lo(), top ? *top : s.sublevel_area(std::max(horizon, hi)));
        }
        cc.families = {up, down};
        cc.chain = inequality_chain(w, c, cl, p.upper.infinite ? std::nullopt : std::optional<Rational>(p.upper.value));
    }
    // the window endpoints themselves are sublevel areas
    closed.emplace_back(s.sublevel_area(lo), s.sublevel_area(lo));
    closed.emplace_back(s.sublevel_area(hi), s.sublevel_area(hi));
    const Rational a_lo = s.sublevel_area(lo);
    const Rational a_hi = s.sublevel_area(hi);
    cc.gaps = uncovered(closed, a_lo, a_hi);
    cc.covered = cc.gaps.empty();
    return cc;
}

}  // namespace

CoverageResult pipe_clearing_coverage(const SingularSurface& s, std::optional<Rational> horizon)
{
    CoverageResult out;
    const auto& pts = s.singular_points();

    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].u < pts[b].u; });

    if (horizon) {
        out.horizon = *horizon;
    } else if (order.empty()) {
        out.horizon = 1;
    } else {
        out.horizon = 4 * pts[order.back()].u.exact();
    }
    if (!(out.horizon > 0))
        throw BadParameters("coverage horizon must be positive");

    // exclusion windows (c/2, 2c) must be disjoint
    bool spaced = true;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const Rational a = 2 * pts[order[i]].u.exact();
        const Rational b = pts[order[i + 1]].u.exact() / 2;
        if (!(a < b)) {
            spaced = false;
            out.report.add("spacing " + pts[order[i]].id + " < " + pts[order[i + 1]].id, false,
                           static_cast<double>(log2_of(b) - log2_of(a)), 0.0, "exclusion windows overlap");
        }
    }
    if (spaced)
        out.report.add("exclusion windows disjoint", true, static_cast<double>(order.size()));
    if (!spaced)
        throw ConstraintViolation("exclusion windows (c/2, 2c) of consecutive critical values overlap");

    // B_t for t outside every window; area is affine between critical values
    Rational t = 0;
    auto add_sublevel = [&](const Rational& a, const Rational& b) {
        if (!(a < b) && !(a == b))
            return;
        CalibratedFamily f;
        f.kind = FamilyKind::sublevel;
        f.p_lo = a;
        f.p_hi = b;
        const Rational fa = s.sublevel_area(a);
        const Rational fb = s.sublevel_area(b);
        f.a1 = a == b ? Rational(0) : Rational((fb - fa) / (b - a));
        f.a0 = fa - f.a1 * a;
        out.sublevels.push_back(std::move(f));
    };
    for (std::size_t i : order) {
        const Rational c = pts[i].u.exact();
        if (t >= out.horizon)
            break;
        add_sublevel(t, std::min(Rational(c / 2), out.horizon));
        t = 2 * c;
    }
    if (t < out.horizon)
        add_sublevel(t, out.horizon);

    out.critical.resize(order.size());
    parallel_for(order.size(), [&](std::size_t j) { out.critical[j] = cover_critical(s, order[j], out.horizon); });

    std::vector<Interval> closed;
    for (const auto& f : out.sublevels)
        closed.emplace_back(f.area_lo(), *f.area_hi());
    for (const auto& cc : out.critical)
        for (const auto& f : cc.families) {
            const auto top = f.area_hi();
            closed.emplace_back(f.area_lo(), top ? *top : s.sublevel_area(std::max(out.horizon, Rational(2 * cc.u.exact()))));
        }
    const Rational total = s.sublevel_area(out.horizon);
    out.gaps = uncovered(std::move(closed), Rational(0), total);
    out.covered = out.gaps.empty();

    for (const auto& cc : out.critical) {
        const std::string tag = "critical " + cc.id;
        out.report.add(tag + " spare component", cc.spare_piece.has_value(), 0.0, 0.0,
                       cc.spare_piece ? "edge " + s.pieces()[*cc.spare_piece].edge_id : "level is connected");
        if (cc.chain) {
            const double scale = static_cast<double>(log2_of(cc.u.exact()));
            const auto& ch = *cc.chain;
            const bool ordered = ch.exact >= ch.annulus && ch.annulus >= ch.relaxed && ch.relaxed >= ch.final;
            out.report.add(tag + " chain ordered", ordered);
            out.report.add(tag + " chain nonnegative", ch.final >= 0,
                           ch.final == 0 ? 0.0 : static_cast<double>(log2_of(abs(ch.final))) - scale, 0.0,
                           "log2(|w c''/4 - 2c| / c)");
        }
        out.report.add(tag + " window covered", cc.covered, static_cast<double>(cc.gaps.size()));
    }
    out.report.add("coverage of (0, T)", out.covered, static_cast<double>(out.gaps.size()), 0.0,
                   "T = " + compact(out.horizon));
    out.report.data() = out.to_json();
    return out;
}

CoverageResult require_pipe_clearing(const SingularSurface& s, std::optional<Rational> horizon)
{
    auto r = pipe_clearing_coverage(s, std::move(horizon));
    for (const auto& cc : r.critical)
        if (!cc.spare_piece)
            throw NoSpareComponent("critical level of " + cc.id + " is connected; gap " +
                                   (cc.gaps.empty() ? std::string("none") : interval_json(cc.gaps.front()).dump()));
    return r;
}

Json CoverageResult::to_json() const
{
    Json j = Json::object();
    j["horizon"] = compact(horizon);
    j["covered"] = covered;
    Json g = Json::array();
    for (const auto& i : gaps)
        g.push_back(interval_json(i));
    j["gaps"] = std::move(g);
    Json b = Json::array();
    for (const auto& f : sublevels)
        b.push_back(f.to_json());
    j["sublevel_families"] = std::move(b);
    Json cs = Json::object();
    for (const auto& cc : critical) {
        Json jc = Json::object();
        jc["vertex"] = cc.id;
        jc["u_exponent16"] = cc.u.exponent16();
        Json fs = Json::array();
        for (const auto& f : cc.families)
            fs.push_back(f.to_json());
        jc["families"] = std::move(fs);
        jc["covered"] = cc.covered;
        Json gs = Json::array();
        for (const auto& i : cc.gaps)
            gs.push_back(interval_json(i));
        jc["gaps"] = std::move(gs);
        if (cc.chain)
            jc["chain_margin"] = compact(cc.chain->final);
        cs["16^" + std::to_string(cc.u.exponent16())] = std::move(jc);
    }
    j["critical"] = std::move(cs);
    return j;
}

}  // namespace isoprofile::calibration
