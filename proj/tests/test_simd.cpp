#include "dualflow/flow.hpp"
#include "dualflow/simd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace dualflow;
using simd::KernelTable;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t m, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(m);
    for (double& x : v) x = d(rng);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void compare_tables(const KernelTable& ref, const KernelTable& vec) {
    std::mt19937_64 rng(1234);
    for (std::size_t m : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 16u, 17u, 31u, 64u, 129u}) {
        CAPTURE(m);
        const auto ext = random_vec(rng, m + 4, -2, 2);
        std::vector<double> a(m), b(m);
        ref.d1(ext.data() + 2, a.data(), m, 1.7);
        vec.d1(ext.data() + 2, b.data(), m, 1.7);
        CHECK(bit_equal(a, b));
        ref.d2(ext.data() + 2, a.data(), m, 3.1);
        vec.d2(ext.data() + 2, b.data(), m, 3.1);
        CHECK(bit_equal(a, b));

        const auto u1 = random_vec(rng, m, -0.5, 0.5), u2 = random_vec(rng, m, -1, 1), th = random_vec(rng, m, 0.2, 2),
                   thd = random_vec(rng, m, 1, 3), cot = random_vec(rng, m, -4, 4);
        for (double sign : {1.0, -1.0}) {
            for (bool axis : {true, false}) {
                std::vector<double> v1(m), p1(m), k1(m), a1(m, 7.0), v2(m), p2(m), k2(m), a2(m, 7.0);
                simd::WarpedInput in{u1.data(), u2.data(), th.data(), thd.data(), axis ? cot.data() : nullptr, sign};
                ref.warped_curvature(in, {v1.data(), p1.data(), k1.data(), a1.data()}, m);
                vec.warped_curvature(in, {v2.data(), p2.data(), k2.data(), a2.data()}, m);
                CHECK(bit_equal(v1, v2));
                CHECK(bit_equal(p1, p2));
                CHECK(bit_equal(k1, k2));
                CHECK(bit_equal(a1, a2));
            }
        }

        auto y1 = random_vec(rng, m, -1, 1), y2 = y1;
        const auto x = random_vec(rng, m, -1, 1);
        ref.axpy(0.37, x.data(), y1.data(), m);
        vec.axpy(0.37, x.data(), y2.data(), m);
        CHECK(bit_equal(y1, y2));

        const auto u = random_vec(rng, m, 0, 1), q1 = random_vec(rng, m, -1, 1), q2 = random_vec(rng, m, -1, 1),
                   q3 = random_vec(rng, m, -1, 1), q4 = random_vec(rng, m, -1, 1);
        std::vector<double> o1(m), o2(m);
        ref.rk4_combine(u.data(), q1.data(), q2.data(), q3.data(), q4.data(), 1e-3, o1.data(), m);
        vec.rk4_combine(u.data(), q1.data(), q2.data(), q3.data(), q4.data(), 1e-3, o2.data(), m);
        CHECK(bit_equal(o1, o2));

        const auto w = random_vec(rng, m, 0, 1);
        const double s1 = ref.weighted_sum(w.data(), x.data(), m), s2 = vec.weighted_sum(w.data(), x.data(), m);
        CHECK(std::memcmp(&s1, &s2, sizeof s1) == 0);
    }
}

}  // namespace

TEST_CASE("scalar kernels against plain formulas") {
    const auto& k = simd::scalar_kernels();
    std::vector<double> ext{1, 2, 3, 5, 8, 13, 21};  // f_0 at index 2
    std::vector<double> out(3);
    k.d1(ext.data() + 2, out.data(), 3, 1.0);
    // -f_{j+2} + 8 f_{j+1} - 8 f_{j-1} + f_{j-2}
    CHECK(out[0] == -8 + 8 * 5 - 8 * 2 + 1);
    k.d2(ext.data() + 2, out.data(), 3, 1.0);
    CHECK(out[0] == -8 + 16 * 5 - 30 * 3 + 16 * 2 - 1);

    const double u1 = 0.2, u2 = -0.4, th = std::sinh(1.1), thd = std::cosh(1.1), cot = 0.5;
    double v, p, kp, ka;
    k.warped_curvature({&u1, &u2, &th, &thd, &cot, 1.0}, {&v, &p, &kp, &ka}, 1);
    const double phi1 = u1 / th, vv = std::sqrt(1 + phi1 * phi1), phi2 = u2 / th - thd * u1 * u1 / (th * th);
    CHECK(p == doctest::Approx(phi1).epsilon(1e-15));
    CHECK(v == doctest::Approx(vv).epsilon(1e-15));
    CHECK(kp == doctest::Approx((thd - phi2 / (vv * vv)) / (vv * th)).epsilon(1e-14));
    CHECK(ka == doctest::Approx((thd - cot * phi1) / (vv * th)).epsilon(1e-14));

    std::vector<double> w{1, 2, 3, 4, 5, 6}, f{1, 1, 1, 1, 1, 1};
    CHECK(k.weighted_sum(w.data(), f.data(), 6) == 21.0);
}

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
    const KernelTable* avx = simd::avx2_kernels();
    if (!avx) {
        MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
        return;
    }
    compare_tables(simd::scalar_kernels(), *avx);
}

TEST_CASE("kernel selection") {
    CHECK_FALSE(simd::select_kernels("bogus"));
    CHECK(simd::select_kernels("scalar"));
    CHECK(std::string(simd::active_kernels().name) == "scalar");
    if (simd::avx2_kernels()) {
        CHECK(simd::select_kernels("avx2"));
        CHECK(std::string(simd::active_kernels().name) == "avx2");
    }
}

TEST_CASE("whole flow is bit-identical across kernel tables") {
    if (!simd::avx2_kernels()) return;
    FlowConfig cfg;
    cfg.F = {FamilySpec::sigma_k(2), 2};
    cfg.m = 48;
    cfg.initial = {"perturbed_sphere", {1.0, 0.1, 2}, 0};
    cfg.t_end = 0.05;
    simd::select_kernels("scalar");
    const auto a = run_flow(cfg);
    simd::select_kernels("avx2");
    const auto b = run_flow(cfg);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(bit_equal(a.states.back().u.values, b.states.back().u.values));
    CHECK(a.states.back().t == b.states.back().t);
}
