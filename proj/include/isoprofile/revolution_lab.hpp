#pragma once

#include "isoprofile/numerics.hpp"
#include "isoprofile/report.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace isoprofile::revolution {

// ---- surfaces of revolution dr^2 + f(r)^2 dtheta^2 ----

struct RadialNode {
    double r = 0.0;
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double area = 0.0;  // V(r) = 2 pi int f
};

class RevolutionSurface {
public:
    RevolutionSurface() = default;

    // samples an analytic f (value, f', f'') on a uniform grid; node areas by adaptive quadrature
    static RevolutionSurface from_function(const std::function<Jet(double)>& f, double r_begin, double r_end,
                                           std::size_t intervals = 4000, double area_at_begin = 0.0);
    // node areas after the first are recomputed from the interpolant
    static RevolutionSurface from_nodes(std::vector<RadialNode> nodes);

    Jet f(double r) const { return spline_.eval(r); }
    double area(double r) const;
    double radius_for_area(double v) const;
    // Gauss curvature -f''/f (limit at a pole)
    double curvature(double r) const;
    double max_curvature() const;

    double r_begin() const { return nodes_.front().r; }
    double r_end() const { return nodes_.back().r; }
    double total_area() const { return nodes_.back().area; }
    bool has_pole() const { return nodes_.front().f == 0.0; }
    const std::vector<RadialNode>& nodes() const { return nodes_; }

    Json to_json() const;

private:
    std::vector<RadialNode> nodes_;
    QuinticSpline spline_;
};

RevolutionSurface euclidean_disk(double radius, std::size_t intervals = 4000);
RevolutionSurface hyperbolic_disk(double radius, std::size_t intervals = 4000);
RevolutionSurface spherical_cap(double k, double radius, std::size_t intervals = 4000);
RevolutionSurface exponential_end(double r_begin, double r_end, std::size_t intervals = 4000);

// ---- candidate profiles, stored through I^2 ----

struct ProfileNode {
    double v = 0.0;
    double i2 = 0.0;
    double d1 = 0.0;  // (I^2)'
    double d2 = 0.0;  // (I^2)''
};

class ProfileFunction {
public:
    using JetFn = std::function<Jet(double)>;
    using ScalarFn = std::function<double(double)>;

    ProfileFunction() = default;

    static ProfileFunction from_nodes(std::vector<ProfileNode> nodes, std::string name = "grid");
    // grid of (v, I^2) with anchors at v = 0; derivatives estimated by local quadratic fits
    static ProfileFunction from_samples(const std::vector<std::pair<double, double>>& grid, double anchor_d1,
                                        double anchor_d2, std::string name = "samples");
    // v_max may be +inf; grid_limit bounds the node grid used for flags and export.
    // ratio, if given, returns I(v)/v without forming I^2 (for huge v)
    static ProfileFunction from_closed_form(JetFn i2, double v_max, double grid_limit, std::string name,
                                            ScalarFn ratio = {}, std::size_t grid = 4001);

    Jet i2(double v) const;
    double value(double v) const;       // I
    double derivative(double v) const;  // I'
    double ratio(double v) const;       // I(v)/v
    double v_max() const { return v_max_; }
    double grid_limit() const { return nodes_.empty() ? 0.0 : nodes_.back().v; }
    const std::vector<ProfileNode>& nodes() const { return nodes_; }
    const std::string& name() const { return name_; }
    bool has_closed_form() const { return static_cast<bool>(closed_); }

    // flags checked on the node grid
    bool nondecreasing() const { return nondecreasing_; }
    bool ratio_nonincreasing() const { return ratio_nonincreasing_; }
    bool convex() const { return convex_; }

    Json to_json() const;

private:
    void compute_flags();

    std::string name_;
    std::vector<ProfileNode> nodes_;
    QuinticSpline spline_;
    JetFn closed_;
    ScalarFn ratio_fn_;
    double v_max_ = 0.0;
    bool nondecreasing_ = false;
    bool ratio_nonincreasing_ = false;
    bool convex_ = false;
};

// "euclidean", "hyperbolic", "bolfiala:<k>", "linear", "vlogv" (optionally "vlogv:<t0>")
ProfileFunction preset(const std::string& name, double v_max = 50.0);
ProfileFunction load_profile(const std::string& path);
ProfileFunction parse_profile(const Json& j);

ProfileFunction profile_from_metric(const RevolutionSurface& s);

struct MetricOptions {
    double v0 = 1e-8;
    double rtol = 1e-10;
    double atol = 1e-12;
    double v_end = 0.0;  // 0 means the profile's v_max (or grid limit)
    std::size_t subdivisions = 4;
};

RevolutionSurface metric_from_profile(const ProfileFunction& profile, const MetricOptions& opt = {});

struct RoundtripResult {
    double sup_relative_error = 0.0;
    double rtol_used = 0.0;
    int attempts = 0;
    RevolutionSurface surface;
};

// metric_from_profile then profile_from_metric, halving the tolerance until the error is below target
RoundtripResult roundtrip(const ProfileFunction& profile, MetricOptions opt = {}, double target = 1e-6,
                          double v_min = 1e-6);

double curvature_of_profile(const ProfileFunction& profile, double v);

// ---- curves {r = rho(theta)} ----

struct RadialMetric {
    std::function<Jet(double)> g;           // g, g', g''
    std::function<double(double)> primitive;  // G with G' = g
};

RadialMetric euclidean_metric();
RadialMetric hyperbolic_metric();
RadialMetric spherical_metric(double k);
RadialMetric metric_of(const RevolutionSurface& s);

struct FourierCurve {
    double r0 = 1.0;
    std::vector<double> a;  // cos(m theta), m = 1..M
    std::vector<double> b;  // sin(m theta)

    Jet at(double theta) const;
    std::size_t modes() const { return a.size(); }
};

double geodesic_curvature(const RadialMetric& metric, const FourierCurve& curve, double theta);

struct CurveMeasure {
    std::vector<double> theta;
    std::vector<double> kappa;
    double length = 0.0;
    double area = 0.0;
};

CurveMeasure measure_curve(const RadialMetric& metric, const FourierCurve& curve, std::size_t samples = 512);

// ---- stability of parallel circles ----

struct StabilityReport {
    double spectral_value = 0.0;  // f'^2 - f f''
    bool strictly_stable = false;  // spectral_value < 1
    double margin = 0.0;          // distance to {m^2 : m >= 1}
    int nearest_mode = 1;
    bool resonant = false;
};

StabilityReport stability_and_spectrum(const Jet& f, double resonance_tol = 1e-9);
StabilityReport stability_and_spectrum(const RevolutionSurface& s, double r, double resonance_tol = 1e-9);

// ---- caps with prescribed profile ----

struct CapDesign {
    double delta = 0.0, k = 0.0, alpha = 0.0;
    std::vector<double> knots;   // 0 = x0 < ... < x5 = delta
    std::vector<double> h;       // (I^2)'' at the knots, linear in between
    std::vector<double> psi;     // (I^2)' at the knots
    std::vector<double> i2;      // I^2 at the knots
    double ramp = 0.0, gamma = 0.0, mu = 0.0;  // shape parameters that succeeded
};

struct Cap {
    CapDesign design;
    ProfileFunction profile;
    RevolutionSurface surface;
};

// profile only; throws BadParameters / ConstraintViolation
std::pair<CapDesign, ProfileFunction> cap_profile(double delta, double k, double alpha);
Cap build_cap(double delta, double k, double alpha, const MetricOptions& opt = {});

struct MergeResult {
    ProfileFunction merged;
    std::optional<std::size_t> dominant_cap;  // <= every other cap everywhere, < somewhere
    bool unique_minimizer = false;
    std::vector<double> grid;
    std::vector<std::size_t> minimizer;  // argmin cap per grid point of (0, m delta]
};

MergeResult merge_profiles(const std::vector<ProfileFunction>& caps, const ProfileFunction& ambient, int m,
                           double delta, double alpha);

// ---- subadditivity ----

using ScalarProfile = std::function<double(double)>;

struct ShapeReport {
    bool ratio_nonincreasing = false;
    bool subadditive_certificate = false;
    // (v, v', F(v+v'), F(v)+F(v'))
    std::optional<std::array<double, 4>> counterexample;
};

ShapeReport shape_predicates(const ScalarProfile& F, const std::vector<double>& grid);
ScalarProfile min_of(ScalarProfile f, ScalarProfile g);
ScalarProfile splice(ScalarProfile f, ScalarProfile g, double delta);
// largest F(v+v') - F(v) - F(v') over random pairs in (0, v_max/2]^2
double max_subadditivity_defect(const ScalarProfile& F, double v_max, std::size_t pairs, std::mt19937_64& rng);

// ---- Bol-Fiala and ultrahyperbolicity constants ----

double bol_fiala(double k, double v);        // sqrt(4 pi v - k v^2); DomainError when negative
double bol_fiala_floor(double k, double v);  // same, 0 where the bound is vacuous
double small_volume_threshold(double k);     // 2 pi / k (inf for k <= 0)
double ultrahyperbolic_rho(double a, double length);

}  // namespace isoprofile::revolution
