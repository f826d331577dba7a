#include "dualflow/dualmap.hpp"
#include "dualflow/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace dualflow;

namespace {

HyperbolicGraph sample(const Grid& g, const oracle::Profile& u) {
    return HyperbolicGraph(ScalarField::sample(g, g.even_parity(), u));
}

double worst(const DualityReport& r) {
    return std::max({r.max_kappa_product_error, r.max_h_mismatch, r.relation_u_ustar_error});
}

}  // namespace

TEST_CASE("duals of spheres are slices") {
    for (int n : {1, 2, 3}) {
        for (double r : {0.3, 0.8, 2.0}) {
            const auto g = Grid::for_dimension(n, 32);
            const auto p = gauss_dual(sample(g, [r](double) { return r; }));
            for (double x : p.dual.u_star.values) CHECK(std::abs(x + r) <= 1e-12);
            CHECK(p.dual.in_past_half());
            const auto rep = verify_duality(p);
            CHECK(worst(rep) <= 1e-10);
            CHECK(rep.scalar_formula_error <= 1e-12);
        }
    }
}

TEST_CASE("slice curvatures in de Sitter space") {
    const auto g = Grid::axisym(2, 32);
    for (double r : {0.4, 1.0}) {
        const auto geo = desitter_geometry(DeSitterGraph(ScalarField::sample(g, Parity::Even, [r](double) { return -r; })));
        for (int j = 0; j < g.m; ++j)
            for (double k : geo.kappa_at(j)) CHECK(k == doctest::Approx(std::tanh(r)).epsilon(1e-12));
    }
    const auto geo0 = desitter_geometry(DeSitterGraph(ScalarField::sample(g, Parity::Even, [](double) { return 0.0; })));
    for (int j = 0; j < g.m; ++j)
        for (double k : geo0.kappa_at(j)) CHECK(std::abs(k) <= 1e-14);
}

TEST_CASE("de Sitter curvatures agree with the embedding oracle at fourth order") {
    const oracle::Profile us = [](double t) { return -0.8 + 0.06 * std::cos(t) - 0.02 * std::cos(2 * t); };
    for (int n : {2, 3}) {
        std::vector<double> hs, es;
        for (int m : {32, 64, 128}) {
            const auto g = Grid::axisym(n, m);
            const auto geo = desitter_geometry(DeSitterGraph(ScalarField::sample(g, Parity::Even, us)));
            double e = 0;
            for (int j = 0; j < m; ++j) {
                const auto c = oracle::desitter(us, g.node(j));
                e = std::max(e, std::abs(geo.kappa_profile[static_cast<std::size_t>(j)] - c.profile));
                e = std::max(e, std::abs(geo.kappa_angular[static_cast<std::size_t>(j)] - c.angular));
            }
            hs.push_back(g.h);
            es.push_back(e);
        }
        CHECK(oracle::observed_order(hs, es) >= 3.7);
    }
}

TEST_CASE("duality relations converge at fourth order") {
    const oracle::Profile u = [](double t) { return 1 + 0.1 * std::cos(t); };
    const auto r64 = verify_duality(gauss_dual(sample(Grid::axisym(2, 64), u)));
    const auto r128 = verify_duality(gauss_dual(sample(Grid::axisym(2, 128), u)));
    CHECK(worst(r64) / worst(r128) >= 12.0);
    CHECK(r64.max_kappa_product_error / r128.max_kappa_product_error >= 12.0);
    CHECK(r64.max_h_mismatch / r128.max_h_mismatch >= 12.0);
    CHECK(r128.max_gradient_sq < 1.0);
    CHECK(r128.scalar_formula_error < 1e-10);
    // u_max = -u*_min and u_min = -u*_max.
    CHECK(r128.relation_u_ustar_error < 1e-8);

    // Circle mode.
    const oracle::Profile uc = [](double t) { return 0.7 + 0.05 * std::cos(t) + 0.03 * std::sin(2 * t); };
    const auto c64 = verify_duality(gauss_dual(sample(Grid::circle(64), uc)));
    const auto c128 = verify_duality(gauss_dual(sample(Grid::circle(128), uc)));
    CHECK(c64.max_kappa_product_error / c128.max_kappa_product_error >= 12.0);
}

TEST_CASE("dual of the exact profile matches the pointwise normal") {
    const oracle::Profile u = [](double t) { return 1 + 0.15 * std::cos(t) + 0.03 * std::cos(2 * t); };
    const auto g = Grid::axisym(2, 128);
    const auto p = gauss_dual(sample(g, u));
    for (int j = 0; j < g.m; j += 7) {
        const double nu0 = oracle::hyperbolic(u, g.node(j)).nu0;
        CHECK(p.u_star_at_matching[static_cast<std::size_t>(j)] == doctest::Approx(-std::asinh(nu0)).epsilon(1e-9));
    }
    // Dual angles are strictly increasing.
    for (std::size_t j = 1; j < p.matching.size(); ++j) CHECK(p.matching[j] > p.matching[j - 1]);
}

TEST_CASE("horoconvex primal has dual curvatures at most one") {
    const auto g = Grid::axisym(3, 64);
    const auto prim = sample(g, [](double t) { return 0.6 + 0.04 * std::cos(2 * t); });
    REQUIRE(geometry_of(prim).horoconvex);
    const auto geo = desitter_geometry(gauss_dual(prim).dual);
    for (int j = 0; j < g.m; ++j) CHECK(geo.max_kappa(j) <= 1.0);
}

TEST_CASE("inverse dual recovers the primal at fourth order") {
    const oracle::Profile u = [](double t) { return 0.9 + 0.1 * std::cos(t) - 0.03 * std::cos(2 * t); };
    std::vector<double> hs, es;
    for (int m : {32, 64, 128}) {
        const auto g = Grid::axisym(2, m);
        const auto prim = sample(g, u);
        const auto back = inverse_dual(gauss_dual(prim).dual);
        double e = 0;
        for (int j = 0; j < m; ++j) e = std::max(e, std::abs(back.u[static_cast<std::size_t>(j)] - prim.u[static_cast<std::size_t>(j)]));
        hs.push_back(g.h);
        es.push_back(e);
    }
    CHECK((es.back() < 1e-12 || oracle::observed_order(hs, es) >= 3.7));
}

TEST_CASE("errors") {
    const auto g = Grid::axisym(2, 64);
    CHECK_THROWS_AS(gauss_dual(sample(g, [](double t) { return 1 + 0.3 * std::cos(6 * t); })), DualityBroken);
    const DeSitterGraph timelike(ScalarField::sample(g, Parity::Even, [](double t) { return -0.5 + 1.5 * std::cos(t); }));
    CHECK_THROWS_AS(desitter_geometry(timelike), CausalityError);
}
