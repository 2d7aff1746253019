#pragma once

#include "isoprofile/numerics.hpp"
#include "isoprofile/report.hpp"
#include "isoprofile/revolution_lab.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace isoprofile::conformal {

struct SolveOptions {
    double v_ceiling = 1e12;    // forward integration stops at this volume
    double v_continue = 1e250;  // continuation of the grid in separated form
    double rtol = 1e-13;
    double chunk = 0.25;        // length in s = log V of one increment chunk
};

struct ConformalPoint {
    double t = 0.0;
    double sigma = 0.0;  // tau - t (inf without blow-up)
    double V = 0.0;
    double f = 0.0;          // V'(t)^{1/n}
    double K = 0.0;          // -(I^2)''(V) / 2
    double residual = 0.0;   // |V'^{(n-1)/n} t - I(V)| / I(V); nan on continued points
    bool continued = false;  // placed by the tail identity, past the forward ceiling
};

// V(t) with V(t0) = t0 and V'(t)^{(n-1)/n} t = I(V(t)), as t against s = log V.
// Integrated through psi = t^{-q} - V^{-q} (q = 1/(n-1)): V = t is a separatrix of the raw
// equation, but psi' = q V^{-q} (1 - (V/I)^p) does not depend on psi and vanishes for I = v.
class ConformalSolution {
public:
    int n() const { return n_; }
    double t0() const { return t0_; }
    std::optional<double> tau() const { return tau_; }
    const std::vector<ConformalPoint>& grid() const { return grid_; }
    const revolution::ProfileFunction& profile() const { return profile_; }
    double s_begin() const { return chunks_.front().s0; }
    double s_end() const { return s_end_; }

    // forward solution as a function of s = log V
    double t_at(double s) const;
    double dt_ds(double s) const;
    // tau - t(s), accurate near the blow-up; needs a finite tau
    double sigma_at(double s) const;
    // log V at tau - sigma; forward range by root finding, beyond by the tail identity
    double log_volume_at_gap(double sigma) const;

    // int_V^inf I^{-n/(n-1)}
    double tail(double log_v) const;
    // (n-1)(t^{-1/(n-1)} - tau^{-1/(n-1)}) at t = tau - sigma
    double identity_lhs(double sigma) const;

    // dt/ds
    double rhs(double s, double t) const;
    // d psi / ds and d phi / ds
    double psi_rhs(double s) const;
    double phi_rhs(double s) const;
    double psi_at(double s) const;
    ConformalPoint point_at_log_volume(double s) const;

    std::string to_csv() const;
    Json to_json() const;

private:
    friend ConformalSolution conformal_solve(const revolution::ProfileFunction&, int, double, const SolveOptions&);

    struct Chunk {
        double s0 = 0.0;
        double psi_base = 0.0;  // psi(s0)
        DenseOde ode;           // psi - psi_base
        DenseOde slope;         // phi - phi(s0), phi' = q V^{-q} (V/I)^p = -d(t^{-q})/ds
        double suffix = 0.0;    // psi(s_end) - psi at the end of this chunk
    };
    const Chunk& chunk(double s) const;
    ConformalPoint make_point(double s, double t, double sigma, bool continued) const;

    int n_ = 2;
    double p_ = 2.0;  // n/(n-1)
    double q_ = 1.0;  // 1/(n-1)
    double t0_ = 1.0;
    double s_end_ = 0.0;
    double t_end_ = 0.0;
    std::optional<double> tau_;
    double sigma_end_ = 0.0;
    double deficit_ = 0.0;   // tau^{-q}
    double remainder_ = 0.0; // psi(inf) - psi(s_end)
    SolveOptions opt_;
    revolution::ProfileFunction profile_;
    std::vector<Chunk> chunks_;
    std::vector<ConformalPoint> grid_;
};

// I convex with I(v) = v on [0, t0], defined on [0, inf)
ConformalSolution conformal_solve(const revolution::ProfileFunction& profile, int n = 2, double t0 = 1.0,
                                  const SolveOptions& opt = {});

// residuals, seam, monotone density, blow-up identity
VerificationReport verify_solution(const ConformalSolution& sol);

// ratio to X/(t log X), completeness integrals, curvature trend; for I = v log v and n = 2
VerificationReport asymptotic_diagnostics(const ConformalSolution& sol);

// ---- vanishing profile ----

struct VanishingChoices {
    std::function<double(double)> v;  // volume of {w = t} in the base metric
    std::function<double(double)> u;  // conformal factor on levels
    std::function<double(double)> h;  // stretch in the w direction
    std::function<double(double)> uv;  // optional closed form of u v (u v(0) may be 0 * inf)
    bool defaults = false;
};

// plane with w = radius: v = 2 pi t, u = 1/((1+t^2) v), h = 1 + t^2
VanishingChoices default_vanishing();

struct VanishingTarget {
    double volume = 0.0;
    double epsilon = 0.0;
};

struct VanishingBand {
    VanishingTarget target;
    double s = 0.0;
    double t = 0.0;
    double volume_bound = 0.0;  // int_s^t h u v
    double volume = 0.0;        // int_s^t u v sqrt(u^2 + h^2), the area of the band for g''
    double boundary = 0.0;      // uv(s) + uv(t)
};

struct VanishingConstruction {
    std::vector<VanishingBand> bands;
    VerificationReport report{"vanishing profile"};

    Json to_json() const;
};

VanishingConstruction vanishing_profile_construction(const std::vector<VanishingTarget>& targets,
                                                     const VanishingChoices& choices = default_vanishing());

}  // namespace isoprofile::conformal
