#include "dualflow/diagnostics.hpp"
#include "dualflow/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace dualflow;

namespace {

FlowState state_of(const HyperbolicGraph& g, const CurvatureFunction& F, double t = 0.0) {
    FlowState s;
    s.t = t;
    s.u = g.u;
    s.geometry = geometry_of(g, &F);
    return s;
}

FlowTrajectory run(FamilySpec f, InitialSpec init, int m = 64) {
    FlowConfig c;
    c.F = {std::move(f), 2};
    c.m = m;
    c.initial = std::move(init);
    c.record_every = 50;
    return run_flow(c);
}

}  // namespace

TEST_CASE("records of spheres") {
    const CurvatureFunction F({FamilySpec::sigma_k(2), 2});
    const auto g = Grid::axisym(2, 32);
    for (double r : {0.5, 1.2}) {
        const auto s = state_of(HyperbolicGraph(ScalarField::sample(g, Parity::Even, [r](double) { return r; })), F);
        const auto rec = compute_record(s, F, nullptr, r, -std::log(r), pinching_epsilon(s.geometry), 0.1);
        CHECK(rec.pinch_ratio == 1.0);
        CHECK(rec.horoconvex_margin == doctest::Approx(1 / std::tanh(r) - 1).epsilon(1e-12));
        CHECK(std::abs(rec.f_sigma_max) <= 1e-12);
        CHECK(std::abs(rec.A2_minus_nF2_max) <= 1e-12);
        CHECK(rec.rho_minus == doctest::Approx(r).epsilon(1e-8));
        CHECK(rec.rho_plus == doctest::Approx(r).epsilon(1e-8));
        CHECK(rec.osc_F_tilde == doctest::Approx(0.0));
        CHECK(rec.F_tilde_dev == doctest::Approx(r / std::tanh(r) - 1).epsilon(1e-12));
        CHECK(std::isnan(rec.duality_err));
        CHECK(std::isnan(rec.w_min));
        CHECK(std::isnan(rec.w_max));
        // With the dual supplied.
        const DeSitterGraph d(ScalarField::sample(g, Parity::Even, [r](double) { return -r; }));
        const auto rd = compute_record(s, F, &d, r, -std::log(r), 0.1, 0.1);
        CHECK(rd.duality_err <= 1e-12);
        CHECK(rd.w_min == doctest::Approx(-1.0));
        CHECK(rd.w_max == doctest::Approx(-1.0));
    }
}

TEST_CASE("pinching epsilon makes the pinching tensor nonnegative at t = 0") {
    const CurvatureFunction F({FamilySpec::sigma_k(2), 3});
    const auto g = Grid::axisym(3, 64);
    const auto prim = HyperbolicGraph(ScalarField::sample(g, Parity::Even, [](double t) { return 0.8 + 0.05 * std::cos(2 * t); }));
    const auto s = state_of(prim, F);
    REQUIRE(s.geometry.horoconvex);
    const double eps = pinching_epsilon(s.geometry);
    CHECK(eps > 0.0);
    const auto rec = compute_record(s, F, nullptr, 1.0, 0.0, eps, 0.1);
    CHECK(rec.pinching_T >= 0.0);
    CHECK(rec.pinch_ratio > 0.0);
    CHECK(rec.pinch_ratio <= 1.0);
}

TEST_CASE("K_N term bounded by the pre-scanned constant on random horoconvex samples") {
    std::mt19937_64 rng(17);
    for (const auto& fam : {FamilySpec::sigma_k(2), FamilySpec::power_mean(0.5), FamilySpec::mean(), FamilySpec::quotient(3, 2)}) {
        const CurvatureFunction F({fam, 3});
        CAPTURE(family_name(fam));
        const double C = kn_constant_prescan(F, 25, 1.0, 6.0);
        CHECK(std::isfinite(C));
        // The ratio is scale invariant, so samples in [1, 6]^3 probe the same set as the scan; the
        // 5% allowance covers points between scan nodes.
        std::uniform_real_distribution<double> d(1.0, 6.0);
        for (int s = 0; s < 2000; ++s) {
            const std::vector<double> k{d(rng), d(rng), d(rng)};
            const double r = kn_ratio(F, k);
            if (std::isfinite(r)) REQUIRE(r <= 1.05 * std::abs(C) + 1e-12);
        }
    }
    CHECK(std::isnan(kn_ratio(CurvatureFunction({FamilySpec::mean(), 2}), std::vector<double>{2, 2})));
}

TEST_CASE("exponential fits") {
    std::vector<double> tau{0, 1, 2, 3, 4}, y;
    for (double t : tau) y.push_back(3 * std::exp(-2 * t));
    const auto f = fit_exponential(tau, y);
    CHECK(f.C == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.delta == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.residual <= 1e-12);
    CHECK_FALSE(f.clipped);
    const std::vector<double> cst(5, 0.7);
    CHECK(std::abs(fit_exponential(tau, cst).delta) <= 1e-14);
    std::vector<double> with_zero = y;
    with_zero[4] = 0.0;
    CHECK(fit_exponential(tau, with_zero).clipped);
    CHECK_THROWS_AS(fit_exponential(std::vector<double>{0, 1}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("decay inequality") {
    SUBCASE("sphere: left side vanishes") {
        const auto traj = run(FamilySpec::mean(), {"sphere", {1.0}, 0}, 32);
        REQUIRE(traj.ok());
        CHECK(decay_check(traj.states, 1e-9, 0.5).holds);
        CHECK(fit_decay(traj.states).holds);
    }
    SUBCASE("sigma_2 perturbed sphere") {
        const auto traj = run(FamilySpec::sigma_k(2), {"perturbed_sphere", {1.0, 0.1, 2}, 0});
        REQUIRE(traj.ok());
        const auto rep = fit_decay(traj.states);
        CHECK(rep.holds);
        CHECK(rep.delta > 0.0);
        // The binding node sits at margin zero up to the rounding of c0.
        CHECK(rep.worst_margin >= -1e-12);
        // Shrinking c0 breaks it: the fit is tight.
        CHECK_FALSE(decay_check(traj.states, 0.5 * rep.c0, rep.delta).holds);
    }
    SUBCASE("mean curvature") {
        const auto traj = run(FamilySpec::mean(), {"perturbed_sphere", {1.0, 0.1, 2}, 0});
        REQUIRE(traj.ok());
        const auto rep = fit_decay(traj.states);
        CHECK(rep.holds);
        CHECK(rep.delta > 0.0);
    }
}
