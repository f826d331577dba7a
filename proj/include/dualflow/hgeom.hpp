#pragma once

// Radial graphs u over S^n in geodesic polar coordinates of H^{n+1}, and their
// realization in Minkowski space R^{n+1,1} with <x,y> = -x^0 y^0 + sum x^a y^a.
//
// Axisymmetric graphs use the direction w(theta) = (sin theta, 0, ..., 0, cos theta);
// the symmetry axis is the last coordinate.

#include "dualflow/curvfn.hpp"
#include "dualflow/sphere_grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dualflow {

struct HyperbolicGraph {
    ScalarField u;

    HyperbolicGraph() = default;
    explicit HyperbolicGraph(ScalarField field);
    const Grid& grid() const noexcept { return u.grid; }
    int n() const noexcept { return u.grid.n; }
};

/// Pointwise geometry of a graph over the grid. Used for both hyperbolic and de Sitter graphs.
struct GraphGeometry {
    Grid grid;
    std::vector<double> v;               // gradient factor
    std::vector<double> phi1;            // u' / sinh u (hyperbolic) or u*' / cosh u* (de Sitter)
    std::vector<double> kappa_profile;
    std::vector<double> kappa_angular;   // (n-1)-fold; empty in Circle mode
    std::vector<double> chi;             // v / sinh u; hyperbolic graphs only
    std::vector<double> F;               // empty unless a curvature function was supplied
    std::vector<double> H;
    std::vector<double> normA2;
    bool strictly_convex = false;
    bool horoconvex = false;
    int first_nonconvex = -1;

    int n() const noexcept { return grid.n; }
    /// Principal curvatures at node j: the profile value followed by n-1 copies of the angular one.
    std::vector<double> kappa_at(int j) const;
    void kappa_at(int j, double* out) const;
    double min_kappa(int j) const;
    double max_kappa(int j) const;
};

/// Curvatures of the graph; F, if given, fills the F field (requires strict convexity).
GraphGeometry geometry_of(const HyperbolicGraph& g, const CurvatureFunction* F = nullptr);

enum class CausalType { Timelike, Spacelike };

struct MinkowskiPoint {
    std::vector<double> coords;  // x^0 first, n + 2 entries
    CausalType causal_type = CausalType::Timelike;
};

double minkowski_dot(const std::vector<double>& a, const std::vector<double>& b);

/// w(theta) in R^{n+1}; Circle mode uses the same formula with n = 1.
std::vector<double> direction(int n, double theta);

struct Embedded {
    MinkowskiPoint position;  // on H^{n+1}
    MinkowskiPoint normal;    // exterior unit normal, a point of de Sitter space
};

Embedded embed(const HyperbolicGraph& g, int node);

/// Position and normal from u, u' at one angle.
Embedded embed_point(int n, double theta, double u, double du);

struct EuclideanRecord {
    double r;           // tanh u
    double v_e;         // Euclidean gradient factor, sqrt(1 + (1 - r^2) phi'^2)
    double v;           // hyperbolic gradient factor
    double h_ratio;     // h~_{theta theta} / h_{theta theta}
    double h_ratio_angular;  // NaN in Circle mode
    double g_ratio;     // g~_{theta theta} / g_{theta theta}
};

/// Compares the Euclidean (Beltrami ball) and hyperbolic second fundamental forms nodewise.
std::vector<EuclideanRecord> euclidean_compare(const HyperbolicGraph& g);

struct Radii {
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double center_offset = 0.0;  // along the axis (Axisym); distance from the origin (Circle)
    double center_offset_minus = 0.0;
    bool fallback_used = false;
};

/// In- and circumradius over axis-centred balls (Axisym) or planar centres (Circle).
Radii inradius_circumradius(const HyperbolicGraph& g);

/// Re-expresses the graph about the axis point at signed geodesic distance s; Axisym only.
HyperbolicGraph recenter(const HyperbolicGraph& g, double s);

/// Radial function of the geodesic sphere of radius R centred at axis distance c.
double translated_sphere_radius(double R, double c, double theta);

struct InitialSpec {
    std::string name = "sphere";
    std::vector<double> params{1.0};
    std::uint64_t seed = 0;
};

/// sphere [r0], perturbed_sphere [r0, a, k], translated_sphere [R, c],
/// ellipsoid [a, b] (Klein-model semi-axes, a along the axis), random_convex [r0, amp].
HyperbolicGraph initial_graph(const InitialSpec& spec, const Grid& grid);

}  // namespace dualflow
