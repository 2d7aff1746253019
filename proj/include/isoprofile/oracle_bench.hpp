#pragma once

#include "isoprofile/report.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isoprofile::oracle {

using revolution::FourierCurve;
using revolution::RadialMetric;

// a rotationally symmetric surface with a pole at r = 0, as seen by the search
struct SearchTarget {
    std::string name;
    RadialMetric metric;     // primitive(0) = 0, so area = int primitive(rho) dtheta
    double r_max = 0.0;      // curves must stay in r < r_max (inf allowed)
    double curvature_bound;  // sup of the Gauss curvature, for the Bol-Fiala floor
};

SearchTarget plane_target();
SearchTarget hyperbolic_target();
SearchTarget sphere_target(double k);
// keeps its own copy of the surface
SearchTarget surface_target(const revolution::RevolutionSurface& s, std::string name = "surface");

// length, area and their gradients in (r0, a_1..a_M, b_1..b_M), trapezoid rule in theta
struct CurveEval {
    double length = 0.0;
    double area = 0.0;
    std::vector<double> grad_length;
    std::vector<double> grad_area;
    double min_rho = 0.0;
    double max_rho = 0.0;
    std::size_t samples = 0;
};

CurveEval evaluate_curve(const RadialMetric& metric, const FourierCurve& curve, std::size_t samples = 512,
                         bool gradients = true);
// doubles the sample count from `samples` until length and area settle to 1e-13
CurveEval evaluate_converged(const RadialMetric& metric, const FourierCurve& curve, std::size_t samples = 512);

// Newton on r0 until |area - v| <= 1e-13 v; false if the curve leaves (0, r_max)
bool project_area(const SearchTarget& target, FourierCurve& curve, double v, std::size_t samples = 512);

double circle_radius(const SearchTarget& target, double v);

struct CompetitorCurve {
    FourierCurve curve;
    double length = 0.0;
    double area = 0.0;
    std::size_t samples = 0;
    std::vector<double> theta, rho, kappa;

    Json to_json() const;
    // theta,rho
    std::string to_csv() const;
};

CompetitorCurve describe_curve(const SearchTarget& target, const FourierCurve& curve, std::size_t samples = 512);

// Hessian of length on {area = v} at the parallel circle, in the coefficients (a, b)
struct HessianReport {
    std::vector<double> eigenvalues;  // ascending
    std::vector<int> modes;           // dominant Fourier mode of each eigenvector
    double largest = 0.0;
    std::vector<std::size_t> degenerate;  // |lambda| < threshold * largest
    double mode1_ratio = 0.0;             // max |lambda| / largest over m = 1 eigenvectors
    double threshold = 1e-6;

    Json to_json() const;
};

HessianReport disk_hessian(const SearchTarget& target, double v, int modes, double eps = 1e-4,
                           double threshold = 1e-6);

struct SearchOptions {
    int modes = 8;
    int trials = 200;
    std::uint64_t seed = 42;
    int max_iterations = 200;
    double amplitude = 0.3;  // initial |a_m|, |b_m| <= amplitude r_v / m^2
    std::size_t samples = 512;
    bool hessian = true;
};

struct SearchResult {
    std::string surface;
    double area = 0.0;
    double circle_radius = 0.0;
    double circle_length = 0.0;
    double best_length = 0.0;
    double relative_gap = 0.0;  // (best - circle) / circle
    bool beats_circle = false;  // relative gap below -1e-6
    std::size_t best_trial = 0;
    CompetitorCurve best;
    std::vector<double> trial_minima;
    std::vector<double> best_so_far;
    std::size_t evaluated = 0;
    double floor_margin = 0.0;      // min over every evaluated competitor of length - J_k(area)
    double worst_area_error = 0.0;  // over accepted iterates, after projection
    std::optional<HessianReport> hessian;

    Json to_json() const;
    VerificationReport report() const;
};

SearchResult competitor_search(const SearchTarget& target, double v, const SearchOptions& opt = {});
SearchResult competitor_search(const revolution::RevolutionSurface& s, double v, const SearchOptions& opt = {});

// kappa at theta as dL/dA under a narrow normal bump, by central differences (Richardson in the width)
double curvature_by_variation(const RadialMetric& metric, const FourierCurve& curve, double theta);

// flux of the calibrating form out of the model disk |z| < sqrt(tanh r)
struct FluxResult {
    double r = 0.0;
    double u_p = 1.0;
    double radius = 0.0;  // sqrt(tanh r)
    double flux = 0.0;
    double oracle = 0.0;  // twice the hyperbolic area of {|zeta| < tanh r}
    double relative_error = 0.0;

    Json to_json() const;
};

FluxResult singular_flux(double r, double u_p = 1.0, std::size_t samples = 4096);

struct SuiteOptions {
    std::vector<std::string> modules;  // empty: all
    std::uint64_t seed = 42;
    bool corrupt_weight = false;       // lighten one edge of one random graph
};

const std::vector<std::string>& suite_modules();
VerificationReport property_suite(const SuiteOptions& opt = {});

}  // namespace isoprofile::oracle
