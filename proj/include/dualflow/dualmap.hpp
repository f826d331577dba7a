#pragma once

// Gauss map between convex graphs in H^{n+1} and spacelike graphs in de Sitter
// space N, written in eigentime coordinates with metric -dtau^2 + cosh^2 tau sigma.
// The light cone is switched once, here: u* = -asinh(nu^0), so duals of convex
// bodies containing the origin are negative.

#include "dualflow/hgeom.hpp"

#include <vector>

namespace dualflow {

/// Sign of the eigentime coordinate after the light-cone switch.
inline constexpr double kEigentimeSign = -1.0;

struct DeSitterGraph {
    ScalarField u_star;

    DeSitterGraph() = default;
    explicit DeSitterGraph(ScalarField field);
    const Grid& grid() const noexcept { return u_star.grid; }
    int n() const noexcept { return u_star.grid.n; }
    bool in_past_half() const { return u_star.max() < 0.0; }
};

struct DualPair {
    HyperbolicGraph primal;
    DeSitterGraph dual;            // resampled onto the primal grid
    std::vector<double> matching;  // dual angle of each primal node
    std::vector<double> u_star_at_matching;  // u* computed pointwise from the normal
};

/// Dual of a strictly convex graph. Throws DualityBroken if the dual angles are not
/// strictly increasing, CausalityError if the resampled dual is not spacelike.
DualPair gauss_dual(const HyperbolicGraph& g);

/// Curvatures of a spacelike graph with respect to the past-directed normal. F, if given,
/// fills the F field. Throws CausalityError where |Du*| >= 1.
GraphGeometry desitter_geometry(const DeSitterGraph& d, const CurvatureFunction* F = nullptr);

struct DualityReport {
    double max_kappa_product_error = 0.0;
    double max_h_mismatch = 0.0;   // relative
    double relation_u_ustar_error = 0.0;
    double scalar_formula_error = 0.0;  // resampled u* against -asinh(sinh u / v)
    double max_gradient_sq = 0.0;       // max |Du*|^2 of the dual
};

DualityReport verify_duality(const DualPair& p);

/// Polar of a spacelike graph back in H^{n+1}, resampled onto its grid.
HyperbolicGraph inverse_dual(const DeSitterGraph& d);

}  // namespace dualflow
