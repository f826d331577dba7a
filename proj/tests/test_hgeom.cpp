#include "dualflow/errors.hpp"
#include "dualflow/hgeom.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dualflow;
using std::numbers::pi;

namespace {

HyperbolicGraph sample(const Grid& g, const oracle::Profile& u) {
    return HyperbolicGraph(ScalarField::sample(g, g.even_parity(), u));
}

double kmax_err(const GraphGeometry& geo, const oracle::Profile& u, bool angular) {
    double e = 0;
    for (int j = 0; j < geo.grid.m; ++j) {
        const auto c = oracle::hyperbolic(u, geo.grid.node(j));
        e = std::max(e, std::abs(geo.kappa_profile[static_cast<std::size_t>(j)] - c.profile));
        if (angular) e = std::max(e, std::abs(geo.kappa_angular[static_cast<std::size_t>(j)] - c.angular));
    }
    return e;
}

}  // namespace

TEST_CASE("umbilic slices") {
    for (int n : {1, 2, 3}) {
        for (double r : {0.1, 1.0, 2.5}) {
            const auto g = Grid::for_dimension(n, 32);
            const auto geo = geometry_of(sample(g, [r](double) { return r; }), nullptr);
            for (int j = 0; j < g.m; ++j) {
                const auto k = geo.kappa_at(j);
                CHECK(k.size() == static_cast<std::size_t>(n));
                for (double x : k) CHECK(std::abs(x - 1.0 / std::tanh(r)) <= 1e-10);
                CHECK(geo.v[static_cast<std::size_t>(j)] == 1.0);
                CHECK(geo.H[static_cast<std::size_t>(j)] == doctest::Approx(n / std::tanh(r)).epsilon(1e-12));
                CHECK(geo.normA2[static_cast<std::size_t>(j)] ==
                      doctest::Approx(n / (std::tanh(r) * std::tanh(r))).epsilon(1e-12));
            }
            CHECK(geo.strictly_convex);
            CHECK(geo.horoconvex);
        }
    }
    const auto geo = geometry_of(sample(Grid::axisym(2, 16), [](double) { return 1.0; }));
    CHECK(geo.kappa_profile[0] == doctest::Approx(1.313035285499331).epsilon(1e-12));
}

TEST_CASE("curvatures agree with the embedding oracle at fourth order") {
    const oracle::Profile u = [](double t) { return 1 + 0.1 * std::cos(t); };
    for (int n : {2, 3}) {
        std::vector<double> hs, es;
        for (int m : {32, 64, 128}) {
            const auto g = Grid::axisym(n, m);
            hs.push_back(g.h);
            es.push_back(kmax_err(geometry_of(sample(g, u)), u, true));
        }
        CAPTURE(n);
        CHECK(oracle::observed_order(hs, es) >= 3.7);
        CHECK(es.back() < 1e-6);
    }
    // Circle mode with a non-symmetric profile.
    const oracle::Profile uc = [](double t) { return 0.8 + 0.05 * std::cos(t) + 0.04 * std::sin(2 * t); };
    std::vector<double> hs, es;
    for (int m : {32, 64, 128}) {
        const auto g = Grid::circle(m);
        hs.push_back(g.h);
        es.push_back(kmax_err(geometry_of(sample(g, uc)), uc, false));
    }
    CHECK(oracle::observed_order(hs, es) >= 3.7);
}

TEST_CASE("gradient factor and convexity flags") {
    const auto g = Grid::axisym(2, 64);
    const auto geo = geometry_of(sample(g, [](double t) { return 1 + 0.1 * std::cos(t); }));
    for (double v : geo.v) CHECK(v >= 1.0);
    CHECK(geo.strictly_convex);
    CHECK(geo.first_nonconvex == -1);
    // A dent makes the profile curvature negative.
    const auto dent = geometry_of(sample(g, [](double t) { return 1 + 0.3 * std::cos(6 * t); }));
    CHECK_FALSE(dent.strictly_convex);
    CHECK(dent.first_nonconvex >= 0);
    CHECK_THROWS_AS(HyperbolicGraph(ScalarField::sample(g, Parity::Even, [](double t) { return std::cos(t); })),
                    DomainError);
    // chi = v / sinh u
    for (int j = 0; j < g.m; ++j)
        CHECK(geo.chi[static_cast<std::size_t>(j)] ==
              doctest::Approx(geo.v[static_cast<std::size_t>(j)] / std::sinh(1 + 0.1 * std::cos(g.node(j)))));
}

TEST_CASE("pole regularity: profile and angular curvatures meet at the poles") {
    std::vector<double> hs, es;
    for (int m : {32, 64, 128}) {
        const auto g = Grid::axisym(2, m);
        const auto geo = geometry_of(sample(g, [](double t) { return 1 + 0.1 * std::cos(t) + 0.05 * std::cos(2 * t); }));
        const ScalarField kp(g, geo.kappa_profile, Parity::Even), ka(g, geo.kappa_angular, Parity::Even);
        hs.push_back(g.h);
        es.push_back(std::max(std::abs(pole_value(kp, true) - pole_value(ka, true)),
                              std::abs(pole_value(kp, false) - pole_value(ka, false))));
    }
    CHECK(es.back() < 1e-5);
    CHECK(oracle::observed_order(hs, es) >= 1.9);
}

TEST_CASE("embedding") {
    const auto g = Grid::axisym(2, 16);
    const auto e = embed_point(2, 0.0, 1.0, 0.0);
    REQUIRE(e.position.coords.size() == 4);
    CHECK(e.position.coords[0] == doctest::Approx(1.543081).epsilon(1e-6));
    CHECK(e.position.coords[1] == doctest::Approx(0.0));
    CHECK(e.position.coords[2] == doctest::Approx(0.0));
    CHECK(e.position.coords[3] == doctest::Approx(1.175201).epsilon(1e-6));
    CHECK(e.position.causal_type == CausalType::Timelike);
    CHECK(e.normal.causal_type == CausalType::Spacelike);

    for (double r : {0.3, 1.7}) {
        const auto s = embed(sample(g, [r](double) { return r; }), 5);
        CHECK(s.normal.coords[0] == doctest::Approx(std::sinh(r)).epsilon(1e-13));
    }
    const oracle::Profile u = [](double t) { return 1 + 0.2 * std::cos(t) - 0.05 * std::cos(2 * t); };
    const auto gr = sample(Grid::axisym(3, 64), u);
    for (int j = 0; j < 64; ++j) {
        const auto p = embed(gr, j);
        const auto& X = p.position.coords;
        const auto& nu = p.normal.coords;
        REQUIRE(X.size() == 5);
        CHECK(std::abs(minkowski_dot(X, X) + 1) <= 1e-10);
        CHECK(std::abs(minkowski_dot(nu, nu) - 1) <= 1e-10);
        CHECK(std::abs(minkowski_dot(nu, X)) <= 1e-10);
        CHECK(X[0] > 0);
    }
    // Normal of the exact profile against the oracle's normal.
    const auto p = embed_point(2, 0.7, u(0.7), -0.2 * std::sin(0.7) + 0.1 * std::sin(1.4));
    CHECK(p.normal.coords[0] == doctest::Approx(oracle::hyperbolic(u, 0.7).nu0).epsilon(1e-10));
}

TEST_CASE("Euclidean comparison") {
    const auto g = Grid::axisym(2, 32);
    {
        const auto rec = euclidean_compare(sample(g, [](double) { return 1.0; }));
        for (const auto& r : rec) {
            CHECK(r.r == doctest::Approx(0.761594).epsilon(1e-6));
            CHECK(r.h_ratio == doctest::Approx(0.419974).epsilon(1e-5));
            CHECK(r.v == 1.0);
            CHECK(r.v_e == 1.0);
        }
        CHECK(euclidean_compare(sample(g, [](double) { return 0.1; }))[0].r == doctest::Approx(0.099668).epsilon(1e-6));
    }
    for (const auto& prof : std::vector<oracle::Profile>{[](double t) { return 1 + 0.1 * std::cos(t); },
                                                         [](double t) { return 0.5 + 0.08 * std::cos(2 * t); },
                                                         [](double t) { return 1.8 - 0.2 * std::cos(t); }}) {
        const auto rec = euclidean_compare(sample(g, prof));
        double rmax = 0;
        for (const auto& r : rec) rmax = std::max(rmax, r.r);
        const double delta = 1 - rmax * rmax;
        for (const auto& r : rec) {
            CHECK(delta * r.v * r.v <= r.v_e * r.v_e * (1 + 1e-14));
            CHECK(r.v_e <= r.v * (1 + 1e-14));
            CHECK(r.g_ratio >= delta * delta * (1 - 1e-12));
            CHECK(r.g_ratio <= 1 + 1e-12);
            CHECK(r.h_ratio >= delta * (1 - 1e-12));
            CHECK(r.h_ratio <= 1 / delta);
            CHECK(r.h_ratio_angular >= delta * (1 - 1e-12));
            CHECK(r.h_ratio_angular <= 1 / delta);
        }
    }
}

TEST_CASE("in- and circumradius") {
    const auto g = Grid::axisym(2, 64);
    {
        const auto r = inradius_circumradius(sample(g, [](double) { return 0.9; }));
        CHECK(r.rho_minus == doctest::Approx(0.9).epsilon(1e-8));
        CHECK(r.rho_plus == doctest::Approx(0.9).epsilon(1e-8));
        CHECK(std::abs(r.center_offset) < 1e-6);
    }
    {
        const auto r = inradius_circumradius(sample(g, [](double t) { return 1 + 0.1 * std::cos(t); }));
        CHECK(r.rho_plus >= r.rho_minus);
        CHECK(r.rho_minus >= 0.9);
        CHECK(r.rho_plus <= 1.1);
        // Dense oracle: distances from axis points to the exact profile.
        auto dist = [](double s, double t) {
            const double u = 1 + 0.1 * std::cos(t);
            return std::acosh(std::cosh(u) * std::cosh(s) - std::sinh(u) * std::sinh(s) * std::cos(t));
        };
        double best_min = 0, best_max = 1e9;
        for (int i = 0; i <= 400; ++i) {
            const double s = -0.2 + 0.4 * i / 400;
            double lo = 1e9, hi = 0;
            for (int k = 0; k <= 2000; ++k) {
                const double d = dist(s, pi * k / 2000);
                lo = std::min(lo, d), hi = std::max(hi, d);
            }
            best_min = std::max(best_min, lo);
            best_max = std::min(best_max, hi);
        }
        CHECK(r.rho_minus == doctest::Approx(best_min).epsilon(1e-4));
        CHECK(r.rho_plus == doctest::Approx(best_max).epsilon(1e-4));
    }
    for (double c : {0.2, 0.5}) {
        const auto tr = initial_graph({"translated_sphere", {0.8, c}, 0}, g);
        const auto r = inradius_circumradius(tr);
        CHECK(std::abs(r.rho_minus - 0.8) <= 1e-4);
        CHECK(std::abs(r.rho_plus - 0.8) <= 1e-4);
        CHECK(std::abs(std::abs(r.center_offset) - c) <= 1e-3);
    }
    // Circle mode.
    const auto rc = inradius_circumradius(sample(Grid::circle(64), [](double) { return 0.7; }));
    CHECK(rc.rho_minus == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(rc.rho_plus == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("translated spheres and recentering") {
    // Hyperbolic law of cosines.
    const double R = 0.8, c = 0.3;
    for (double t : {0.0, 0.4, 1.3, pi}) {
        const double u = translated_sphere_radius(R, c, t);
        const double d = std::acosh(std::cosh(u) * std::cosh(c) - std::sinh(u) * std::sinh(c) * std::cos(t));
        CHECK(d == doctest::Approx(R).epsilon(1e-12));
    }
    // Recentering interpolates the translated profile with six-point stencils.
    std::vector<double> hs, es;
    for (int m : {64, 128, 256}) {
        const auto g = Grid::axisym(2, m);
        const auto back = recenter(initial_graph({"translated_sphere", {R, c}, 0}, g), c);
        double e = 0;
        for (double x : back.u.values) e = std::max(e, std::abs(x - R));
        hs.push_back(g.h);
        es.push_back(e);
    }
    CHECK(es[0] <= 1e-9);
    CHECK((es.back() <= 1e-13 || oracle::observed_order(hs, es) >= 5.5));
}

TEST_CASE("initial data") {
    const auto g = Grid::axisym(2, 64);
    const auto s = initial_graph({"sphere", {1.2}, 0}, g);
    for (double x : s.u.values) CHECK(x == 1.2);
    const auto p = initial_graph({"perturbed_sphere", {1.0, 0.1, 2}, 0}, g);
    CHECK(p.u[0] == doctest::Approx(1 + 0.1 * std::cos(2 * g.node(0))));
    const auto e = initial_graph({"ellipsoid", {0.6, 0.5}, 0}, g);
    CHECK(std::tanh(e.u[0]) == doctest::Approx(0.6).epsilon(1e-3));
    CHECK(geometry_of(e).strictly_convex);
    const auto r1 = initial_graph({"random_convex", {1.0, 0.05}, 7}, g);
    const auto r2 = initial_graph({"random_convex", {1.0, 0.05}, 7}, g);
    const auto r3 = initial_graph({"random_convex", {1.0, 0.05}, 8}, g);
    CHECK(r1.u.values == r2.u.values);
    CHECK(r1.u.values != r3.u.values);
    CHECK(geometry_of(r1).strictly_convex);
    CHECK_THROWS(initial_graph({"teapot", {}, 0}, g));
    CHECK_THROWS(initial_graph({"sphere", {-1.0}, 0}, g));
    CHECK_NOTHROW(initial_graph({"perturbed_sphere", {1.0, 0.1, 1}, 0}, g));
}
