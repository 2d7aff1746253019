#include "isoprofile/numerics.hpp"

#include "isoprofile/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace isoprofile {

QuinticSpline::QuinticSpline(std::vector<SplineNode> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 2)
        throw BadParameters("quintic spline needs at least two nodes");
    const std::size_t m = nodes_.size() - 1;
    coef_.resize(6 * m);
    prefix_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& a = nodes_[i];
        const auto& b = nodes_[i + 1];
        const double h = b.x - a.x;
        if (!(h > 0.0))
            throw BadParameters("spline abscissae must be strictly increasing");
        const double dy = b.y - (a.y + a.d1 * h + 0.5 * a.d2 * h * h);
        const double dd1 = b.d1 - (a.d1 + a.d2 * h);
        const double dd2 = b.d2 - a.d2;
        double* c = &coef_[6 * i];
        c[0] = a.y;
        c[1] = a.d1;
        c[2] = 0.5 * a.d2;
        c[3] = (10.0 * dy - 4.0 * dd1 * h + 0.5 * dd2 * h * h) / (h * h * h);
        c[4] = (-15.0 * dy + 7.0 * dd1 * h - dd2 * h * h) / (h * h * h * h);
        c[5] = (6.0 * dy - 3.0 * dd1 * h + 0.5 * dd2 * h * h) / (h * h * h * h * h);
        prefix_[i + 1] = prefix_[i] + segment_primitive(i, h);
    }
}

std::size_t QuinticSpline::locate(double x) const
{
    if (x <= nodes_.front().x)
        return 0;
    if (x >= nodes_.back().x)
        return nodes_.size() - 2;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                               [](double v, const SplineNode& n) { return v < n.x; });
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

double QuinticSpline::segment_primitive(std::size_t i, double t) const
{
    const double* c = &coef_[6 * i];
    return t * (c[0] + t * (c[1] / 2 + t * (c[2] / 3 + t * (c[3] / 4 + t * (c[4] / 5 + t * c[5] / 6)))));
}

Jet QuinticSpline::eval(double x) const
{
    const std::size_t i = locate(x);
    const double t = x - nodes_[i].x;
    const double* c = &coef_[6 * i];
    Jet j;
    j.value = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    j.d1 = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
    j.d2 = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
    return j;
}

double QuinticSpline::primitive(double x) const
{
    const std::size_t i = locate(x);
    return prefix_[i] + segment_primitive(i, x - nodes_[i].x);
}

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

DenseOde DenseOde::integrate(const Rhs& f, double x0, double y0, double x_end, const Options& opt,
                             const Stop& stop)
{
    DenseOde out;
    out.x_begin_ = x0;
    out.y_begin_ = y0;
    out.y_end_ = y0;
    const double dir = x_end >= x0 ? 1.0 : -1.0;
    const double span = std::abs(x_end - x0);
    if (span == 0.0)
        return out;

    double x = x0, y = y0;
    double k1 = f(x, y);
    if (!std::isfinite(k1))
        throw DomainError("ODE right-hand side is not finite at the start");
    double h = opt.initial_step;
    if (h <= 0.0) {
        const double sc = opt.atol + opt.rtol * std::abs(y);
        const double dy = std::abs(k1) / sc;
        h = dy > 1e-5 ? 0.01 / dy : 1e-6 * span;
        h = std::max(h, 1e-12 * span);
    }
    h = std::min({h, span, opt.max_step});

    std::size_t count = 0;
    while (dir * (x_end - x) > 0.0) {
        if (++count > opt.max_steps)
            throw DomainError("ODE step budget exhausted");
        if (h > std::abs(x_end - x))
            h = std::abs(x_end - x);
        const double hs = dir * h;
        const double k2 = f(x + c2 * hs, y + hs * (a21 * k1));
        const double k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const double k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 =
            f(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double k7 = f(x + hs, ynew);
        const double err_abs =
            hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(ynew));
        double err = std::abs(err_abs) / sc;
        if (!std::isfinite(err) || !std::isfinite(ynew))
            err = 1e10;

        if (err <= 1.0) {
            Step s;
            s.x = x;
            s.h = hs;
            s.r1 = y;
            s.r2 = ynew - y;
            s.r3 = hs * k1 - s.r2;
            s.r4 = s.r2 - hs * k7 - s.r3;
            s.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            out.steps_.push_back(s);
            x = (std::abs(x_end - (x + hs)) < 1e-15 * span) ? x_end : x + hs;
            y = ynew;
            k1 = k7;
            out.y_end_ = y;
            if (stop && stop(x, y))
                break;
        }
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(h * fac, opt.max_step);
        if (h < 1e-15 * std::max(1.0, std::abs(x)))
            throw DomainError("ODE step size underflow near x=" + std::to_string(x));
    }
    return out;
}

const DenseOde::Step& DenseOde::locate(double x) const
{
    if (steps_.empty())
        throw DomainError("dense output queried on an empty solution");
    const double dir = steps_.front().h > 0 ? 1.0 : -1.0;
    auto it = std::upper_bound(steps_.begin(), steps_.end(), x,
                               [dir](double v, const Step& s) { return dir * v < dir * s.x; });
    if (it == steps_.begin())
        return steps_.front();
    return *(it - 1);
}

double DenseOde::value(double x) const
{
    if (steps_.empty())
        return y_begin_;
    const Step& s = locate(x);
    const double th = (x - s.x) / s.h;
    const double th1 = 1.0 - th;
    return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
}

double DenseOde::derivative(double x) const
{
    const Step& s = locate(x);
    const double th = (x - s.x) / s.h;
    const double q = s.r4 + (1.0 - th) * s.r5;
    const double dq = -s.r5;
    const double r = s.r3 + th * q;
    const double dr = q + th * dq;
    const double u = s.r2 + (1.0 - th) * r;
    const double du = -r + (1.0 - th) * dr;
    return (u + th * du) / s.h;
}

std::vector<double> DenseOde::mesh() const
{
    std::vector<double> m;
    m.reserve(steps_.size() + 1);
    m.push_back(x_begin_);
    for (const auto& s : steps_)
        m.push_back(s.x + s.h);
    return m;
}

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ISOPROFILE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            n = static_cast<unsigned>(v);
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = n;
    std::exception_ptr failure;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(run);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

namespace {

double gk_panel(const std::function<double(double)>& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0);
}

// bisect until a panel agrees with its two halves; boost's own estimate floors near 1e-12
double adapt(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth,
             double* err)
{
    const double m = 0.5 * (a + b);
    const double l = gk_panel(f, a, m);
    const double r = gk_panel(f, m, b);
    const double e = std::abs(l + r - whole);
    if (e <= tol * std::abs(l + r) + 1e-300 || depth >= 16 || !(m > a && m < b)) {
        *err += e;
        return l + r;
    }
    return adapt(f, a, m, l, tol, depth + 1, err) + adapt(f, m, b, r, tol, depth + 1, err);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double* error)
{
    double err = 0.0;
    const double v = a == b ? 0.0 : adapt(f, a, b, gk_panel(f, a, b), std::max(rel_tol, 1e-15), 0, &err);
    if (error)
        *error = err;
    return v;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol,
                             double* error)
{
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, std::numeric_limits<double>::infinity(), 12, std::max(rel_tol, 1e-12), &err);
    if (error)
        *error = err;
    return v;
}

double find_root(const std::function<double(double)>& f, double a, double b, int bits)
{
    const double fa = f(a), fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw DomainError("root is not bracketed");
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(bits),
                                                     iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace isoprofile
