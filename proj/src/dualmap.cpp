#include "dualflow/dualmap.hpp"

#include "dualflow/errors.hpp"
#include "geometry_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dualflow {

namespace {

void check_monotone(const Grid& g, const std::vector<double>& x) {
    for (std::size_t j = 1; j < x.size(); ++j)
        if (!(x[j] > x[j - 1]))
            throw DualityBroken("dual angles not increasing at node " + std::to_string(j) +
                                "; primal is not strictly convex at this resolution");
    if (g.mode == GridMode::Axisym) {
        if (!(x.front() > 0.0) || !(x.back() < std::numbers::pi))
            throw DualityBroken("dual angles leave (0, pi)");
    } else if (!(x.back() - x.front() < 2.0 * std::numbers::pi)) {
        throw DualityBroken("dual angles wrap past a full turn");
    }
}

}  // namespace

DeSitterGraph::DeSitterGraph(ScalarField field) : u_star(std::move(field)) {
    for (std::size_t j = 0; j < u_star.size(); ++j)
        if (!std::isfinite(u_star.values[j]))
            throw DomainError("eigentime height is not finite at node " + std::to_string(j));
    u_star.parity = u_star.grid.even_parity();
}

DualPair gauss_dual(const HyperbolicGraph& g) {
    const auto geo = geometry_of(g);
    if (!geo.strictly_convex)
        throw DualityBroken("primal graph is not strictly convex at node " + std::to_string(geo.first_nonconvex));
    const Grid& gr = g.grid();
    const auto m = static_cast<std::size_t>(gr.m);
    DualPair p;
    p.primal = g;
    p.matching.resize(m);
    p.u_star_at_matching.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double u = g.u.values[j];
        // nu = v^-1 (sinh u, cosh u w - phi' w_theta); its spatial part points along w(theta + alpha).
        const double nu0 = std::sinh(u) / geo.v[j];
        const double alpha = std::atan2(-geo.phi1[j], std::cosh(u));
        p.matching[j] = gr.node(static_cast<int>(j)) + alpha;
        p.u_star_at_matching[j] = kEigentimeSign * std::asinh(nu0);
    }
    check_monotone(gr, p.matching);
    p.dual = DeSitterGraph(resample_high_order(p.matching, p.u_star_at_matching, gr, gr.even_parity()));
    desitter_geometry(p.dual);  // spacelike check
    return p;
}

GraphGeometry desitter_geometry(const DeSitterGraph& d, const CurvatureFunction* F) {
    detail::GeometryWorkspace ws(d.grid());
    ws.compute(d.u_star.values, -1.0);
    for (std::size_t j = 0; j < ws.v.size(); ++j)
        if (!(ws.v[j] > 0.0))
            throw CausalityError("de Sitter graph is not spacelike at node " + std::to_string(j), static_cast<int>(j));
    return detail::assemble_geometry(ws, d.u_star.values, -1.0, F);
}

DualityReport verify_duality(const DualPair& p) {
    const auto& g = p.primal;
    const Grid& gr = g.grid();
    const auto m = static_cast<std::size_t>(gr.m);
    const bool axisym = gr.mode == GridMode::Axisym;
    const auto geo = geometry_of(g);
    const auto dgeo = desitter_geometry(p.dual);

    const Parity even = gr.even_parity();
    auto back = [&](const std::vector<double>& f) {
        return interpolate_at(ScalarField(gr, f, even), p.matching);
    };
    const auto kp_t = back(dgeo.kappa_profile);
    const auto vt = back(dgeo.v);
    const auto us_t = interpolate_at(p.dual.u_star, p.matching);
    std::vector<double> ka_t;
    if (axisym) ka_t = back(dgeo.kappa_angular);

    std::vector<double> alpha(m);
    for (std::size_t j = 0; j < m; ++j) alpha[j] = p.matching[j] - gr.node(static_cast<int>(j));
    const auto dalpha = differentiate(ScalarField(gr, alpha, gr.odd_parity()), 1);

    DualityReport r;
    for (std::size_t j = 0; j < m; ++j) {
        const double u = g.u.values[j], us = p.u_star_at_matching[j];
        const double su = std::sinh(u), cs = std::cosh(us);
        r.max_kappa_product_error = std::max(r.max_kappa_product_error, std::abs(kp_t[j] * geo.kappa_profile[j] - 1.0));
        const double jac = 1.0 + dalpha.values[j];
        const double h = geo.kappa_profile[j] * su * su * geo.v[j] * geo.v[j];
        const double ht = kp_t[j] * cs * cs * vt[j] * vt[j] * jac * jac;
        r.max_h_mismatch = std::max(r.max_h_mismatch, std::abs(ht - h) / std::abs(h));
        if (axisym) {
            r.max_kappa_product_error = std::max(r.max_kappa_product_error, std::abs(ka_t[j] * geo.kappa_angular[j] - 1.0));
            const double st = std::sin(gr.node(static_cast<int>(j))), sts = std::sin(p.matching[j]);
            const double ha = geo.kappa_angular[j] * su * su * st * st;
            const double hta = ka_t[j] * cs * cs * sts * sts;
            r.max_h_mismatch = std::max(r.max_h_mismatch, std::abs(hta - ha) / std::abs(ha));
        }
        r.scalar_formula_error =
            std::max(r.scalar_formula_error, std::abs(us_t[j] - kEigentimeSign * std::asinh(su / geo.v[j])));
    }
    const double umax = refine_extremum(g.u, true).value, umin = refine_extremum(g.u, false).value;
    const double smax = refine_extremum(p.dual.u_star, true).value, smin = refine_extremum(p.dual.u_star, false).value;
    r.relation_u_ustar_error = std::max(std::abs(umax + smin), std::abs(umin + smax));
    for (double x : dgeo.phi1) r.max_gradient_sq = std::max(r.max_gradient_sq, x * x);
    return r;
}

HyperbolicGraph inverse_dual(const DeSitterGraph& d) {
    const Grid& gr = d.grid();
    const auto m = static_cast<std::size_t>(gr.m);
    const auto geo = desitter_geometry(d);
    std::vector<double> theta(m), u(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double us = d.u_star.values[j];
        const double psi1 = geo.phi1[j], vt = geo.v[j];
        // x = v~^-1 ((cosh u*, -sinh u* w) - psi' (0, w_theta))
        const double x0 = std::cosh(us) / vt;
        u[j] = std::acosh(x0);
        theta[j] = gr.node(static_cast<int>(j)) + std::atan2(-psi1, -std::sinh(us));
    }
    check_monotone(gr, theta);
    return HyperbolicGraph(resample_high_order(theta, u, gr, gr.even_parity()));
}

}  // namespace dualflow
