#pragma once

#include "isoprofile/cusp_assembly.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace isoprofile::calibration {

// ---- calibration ----

// d(omega) = c vol gives I(v) >= c v
double calibration_lower_bound(double c, double v);

struct CalibrationBound {
    double bound = 0.0;
    bool equality = false;  // a calibrated region of area v has boundary length c v
};
CalibrationBound calibration_lower_bound(double c, double v, double calibrated_length, double rel_tol = 1e-12);

// ball of a manifold with Ric <= -(n-1) rho^2 style bound: I_B(v) >= (n-1) rho v
double ball_lower_bound(int n, double rho, double v);
// constant curvature cusp of dimension n
double cusp_profile(int n, double v);

// ---- rearrangement on a surface of revolution ----

struct RearrangementResult {
    double r0 = 0.0;
    double level = 0.0;            // u(r0)
    double area = 0.0;             // area of V = {r <= r0}
    double integral = 0.0;         // int_V u
    double boundary_length = 0.0;  // every boundary circle of V
    bool sandwich = false;         // {u < level} in V in {u <= level}
    bool equality = false;         // int_V u matches the boundary length
    double defect = 0.0;           // |integral - boundary_length| / boundary_length

    Json to_json() const;
};

// u is a function of r; below r_begin it is taken constant (cusp ends carry area_at_begin)
RearrangementResult rearrangement_bound(const revolution::RevolutionSurface& s, const std::function<double(double)>& u,
                                        double r0, double tol = 1e-8);
// u = f'/f, the density of omega = f dtheta
std::function<double(double)> log_derivative_density(const revolution::RevolutionSurface& s);

// ---- pipe clearing ----

enum class FamilyKind { sublevel, clearing_up, clearing_down };  // B_t, C_{e,s}, D_{e,s}

const char* family_name(FamilyKind k);

struct CalibratedFamily {
    FamilyKind kind = FamilyKind::sublevel;
    Rational p_lo;
    std::optional<Rational> p_hi;  // nullopt: unbounded parameter (anticusp edge)
    Rational a0;                   // area = a0 + a1 p
    Rational a1;
    std::optional<std::size_t> piece;   // edge piece carrying the family
    std::optional<std::size_t> vertex;  // critical point
    std::optional<level_graph::LevelValue> critical;

    Rational area_at(const Rational& p) const { return a0 + a1 * p; }
    Rational area_lo() const { return area_at(p_lo); }
    std::optional<Rational> area_hi() const;

    Json to_json() const;
};

// terms of the inequality chain for C_{e,c''/2} against D_{e,2c'}, each at least the next
struct ChainTerms {
    Rational exact;      // area(C top) - area(D bottom)
    Rational annulus;    // w (c''/2 - 2c') - 3c/2
    Rational relaxed;    // (3/8) w c'' - 3c/2
    Rational final;      // w c''/4 - 2c
};
// nullopt when c'' is infinite (the chain is vacuous)
std::optional<ChainTerms> inequality_chain(const Rational& w, const Rational& c, const Rational& c_lower,
                                           const std::optional<Rational>& c_upper);

using Interval = std::pair<Rational, Rational>;

struct CriticalCoverage {
    std::size_t point = 0;  // index into SingularSurface::singular_points()
    std::string id;
    level_graph::LevelValue u;
    std::optional<std::size_t> spare_piece;
    std::vector<CalibratedFamily> families;
    std::optional<ChainTerms> chain;
    std::vector<Interval> gaps;  // uncovered parts of (c/2, 2c)
    bool covered = false;
};

struct CoverageResult {
    Rational horizon;
    std::vector<CalibratedFamily> sublevels;
    std::vector<CriticalCoverage> critical;
    std::vector<Interval> gaps;  // uncovered open intervals of (0, horizon)
    bool covered = false;
    VerificationReport report{"pipe clearing coverage"};

    Json to_json() const;
};

// horizon defaults to 4 max(c), or 1 without critical points
CoverageResult pipe_clearing_coverage(const cusp_assembly::SingularSurface& s,
                                      std::optional<Rational> horizon = {});
// as above, but a connected critical level raises NoSpareComponent
CoverageResult require_pipe_clearing(const cusp_assembly::SingularSurface& s, std::optional<Rational> horizon = {});

// (0, T) minus the union of closed intervals, as open intervals
std::vector<Interval> uncovered(std::vector<Interval> closed, const Rational& lo, const Rational& hi);

// short text for a rational that may have thousands of digits
std::string compact(const Rational& q);

}  // namespace isoprofile::calibration
