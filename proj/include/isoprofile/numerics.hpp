#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace isoprofile {

// value and first two derivatives
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct SplineNode {
    double x = 0.0;
    double y = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// C2 piecewise quintic Hermite interpolant
class QuinticSpline {
public:
    QuinticSpline() = default;
    explicit QuinticSpline(std::vector<SplineNode> nodes);

    bool empty() const { return nodes_.empty(); }
    double x_front() const { return nodes_.front().x; }
    double x_back() const { return nodes_.back().x; }
    const std::vector<SplineNode>& nodes() const { return nodes_; }

    // outside the node range the end polynomials are extended
    Jet eval(double x) const;
    // integral of y from x_front() to x
    double primitive(double x) const;

private:
    std::size_t locate(double x) const;
    double segment_primitive(std::size_t i, double local) const;

    std::vector<SplineNode> nodes_;
    std::vector<double> coef_;    // 6 monomial coefficients per segment, local variable x - x_i
    std::vector<double> prefix_;  // integral from x_front() to each node
};

// Dormand-Prince 5(4) for a scalar ODE y' = F(x, y), keeping the dense output
class DenseOde {
public:
    using Rhs = std::function<double(double, double)>;
    using Stop = std::function<bool(double, double)>;

    struct Options {
        double rtol = 1e-10;
        double atol = 1e-12;
        double initial_step = 0.0;  // 0 picks one from the rhs
        double max_step = std::numeric_limits<double>::infinity();
        std::size_t max_steps = 2000000;
    };

    // integrates from x0 towards x_end; stops after the first step at which stop(x, y) holds
    static DenseOde integrate(const Rhs& f, double x0, double y0, double x_end, const Options& opt,
                              const Stop& stop = {});

    double x_begin() const { return x_begin_; }
    double x_end() const { return steps_.empty() ? x_begin_ : steps_.back().x + steps_.back().h; }
    double y_end() const { return y_end_; }
    std::size_t step_count() const { return steps_.size(); }

    double value(double x) const;
    double derivative(double x) const;
    // step boundaries, x_begin() first
    std::vector<double> mesh() const;

private:
    struct Step {
        double x, h;
        double r1, r2, r3, r4, r5;
    };
    const Step& locate(double x) const;

    double x_begin_ = 0.0;
    double y_begin_ = 0.0;
    double y_end_ = 0.0;
    std::vector<Step> steps_;
};

// worker count: ISOPROFILE_THREADS if set, else hardware concurrency
unsigned worker_count();
// runs body(i) for i in [0, n); the first exception (lowest index) is rethrown
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// adaptive Gauss-Kronrod on [a, b]
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13,
                 double* error = nullptr);
// integral over [a, +inf)
double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol = 1e-13,
                             double* error = nullptr);

// bracketed root of f on [a, b] (f(a), f(b) of opposite signs), toms748
double find_root(const std::function<double(double)>& f, double a, double b, int bits = 50);

}  // namespace isoprofile
