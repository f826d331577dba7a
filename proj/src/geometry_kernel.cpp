#include "geometry_kernel.hpp"

#include "dualflow/simd/kernels.hpp"

#include <cmath>

namespace dualflow::detail {

GeometryWorkspace::GeometryWorkspace(const Grid& g) : grid(g) {
    const auto m = static_cast<std::size_t>(g.m);
    for (auto* b : {&u1, &u2, &th, &thd, &v, &phi1, &kprof, &kang}) b->resize(m);
    if (g.mode == GridMode::Axisym) {
        cot.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double t = g.node(static_cast<int>(j));
            cot[j] = std::cos(t) / std::sin(t);
        }
    }
}

void GeometryWorkspace::compute(std::span<const double> u, double sign) {
    differentiate_into(grid, grid.even_parity(), u, 1, u1, ext);
    differentiate_into(grid, grid.even_parity(), u, 2, u2, ext);
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double s = std::sinh(u[j]), c = std::cosh(u[j]);
        th[j] = sign > 0 ? s : c;
        thd[j] = sign > 0 ? c : s;
    }
    simd::WarpedInput in{u1.data(), u2.data(), th.data(), thd.data(), cot.empty() ? nullptr : cot.data(), sign};
    simd::WarpedOutput out{v.data(), phi1.data(), kprof.data(), kang.data()};
    simd::active_kernels().warped_curvature(in, out, u.size());
}

}  // namespace dualflow::detail
