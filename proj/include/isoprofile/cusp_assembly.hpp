#pragma once

#include "isoprofile/level_graph.hpp"
#include "isoprofile/report.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace isoprofile::cusp_assembly {

// constant curvature -1 annulus {c <= w <= c'} with circumference parameter tau
struct Annulus {
    double tau = 1.0;
    double c = 1.0;
    double c_prime = 2.0;  // may be +inf (anticusp)
};

struct AnnulusGeometry {
    double area = 0.0;                    // +inf for an anticusp
    std::vector<double> boundary_lengths;  // a cusp has a single boundary
    double height = 0.0;                   // log(c'/c); +inf for cusp or anticusp
};

AnnulusGeometry annulus_geometry(const Annulus& a);
// A_{tau,c,c'} is isometric to A_{c tau, 1, c'/c}
Annulus normalized(const Annulus& a);

// a level in [0, +inf]: u of a vertex, 0 for a cusp end, +inf for an anticusp end
struct ExtendedLevel {
    bool infinite = false;
    Rational value = 0;

    long double linear() const;
};

struct PantsPiece {
    std::size_t edge = 0;
    std::string edge_id;
    Rational weight;
    ExtendedLevel lower;  // c = u(alpha(e))
    ExtendedLevel upper;  // c' = u(omega(e))
    std::optional<std::size_t> lower_vertex;
    std::optional<std::size_t> upper_vertex;

    // weight * (c' - c); nullopt when infinite
    std::optional<Rational> area() const;
};

struct GluedCircle {
    std::size_t vertex = 0;
    std::vector<std::size_t> edges;    // pieces meeting on this side
    std::vector<Rational> arc_lengths;  // weight(e) * u(vertex) per piece
    Rational length;
};

struct SingularPoint {
    std::size_t vertex = 0;
    std::string id;
    level_graph::LevelValue u;
    GluedCircle single_side;  // the circle of the lone edge
    GluedCircle split_side;   // the figure-eight side, two marked arcs
    double cone_angle = 0.0;
};

class SingularSurface {
public:
    const std::vector<PantsPiece>& pieces() const { return pieces_; }
    const std::vector<SingularPoint>& singular_points() const { return points_; }
    std::size_t crossing_count() const { return n_; }

    // area of {u <= t}, exact
    Rational sublevel_area(const Rational& t) const;
    // floating path
    long double sublevel_area(long double t) const;
    // area of {s < u <= t}
    Rational band_area(const Rational& s, const Rational& t) const;

    // pieces crossing the level t (strictly inside their [c, c'])
    std::vector<std::size_t> pieces_crossing(const Rational& t) const;
    // chart radius min(log 2, arcsinh(l/2)), l the shortest arc through the point
    double chart_radius(std::size_t point) const;

    Json to_json() const;

private:
    friend SingularSurface assemble_surface(const level_graph::LevelGraph&, const level_graph::Weighting&,
                                            const std::vector<level_graph::LevelValue>&);
    std::vector<PantsPiece> pieces_;
    std::vector<SingularPoint> points_;
    std::size_t n_ = 0;
};

SingularSurface assemble_surface(const level_graph::LevelGraph& g, const level_graph::Weighting& w,
                                 const std::vector<level_graph::LevelValue>& u);

// evenly spaced samples (t, area(B_t)) for plotting
std::vector<std::pair<double, double>> sublevel_samples(const SingularSurface& s, double t_max,
                                                        std::size_t count);

struct ModelSample {
    double w0 = 0.0;                // u_p |z^2 - i|^2 / (1 - |z|^4)
    double conformal_factor = 0.0;  // lambda with g0 = lambda |dz|^2
    std::optional<double> curvature;       // finite-difference Gauss curvature of g0
    std::optional<double> gradient_ratio;  // |grad w0|_{g0} / w0
};

// chart bound |z| < sqrt(tanh r); z = 0 is allowed (diagnostics are skipped there)
ModelSample singular_model_eval(double u_p, std::complex<double> z, double chart_radius = 0.6931471805599453);

// total angle around the singular point, measured on the circle |z| = rho in the double-cover model
double cone_angle(double rho, std::size_t samples = 4096);

}  // namespace isoprofile::cusp_assembly
