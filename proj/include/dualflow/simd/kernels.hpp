#pragma once

// Hot loops of the solver as a table of function pointers. The scalar table is
// the reference; vector tables must reproduce it bit for bit (same operation
// order, no FMA), which the tests check.

#include <cstddef>
#include <string_view>

namespace dualflow::simd {

struct WarpedInput {
    const double* u1;    // du/dtheta
    const double* u2;    // d2u/dtheta2
    const double* th;    // warp factor: sinh u (hyperbolic) or cosh u (de Sitter)
    const double* thd;   // its derivative: cosh u or sinh u
    const double* cot;   // cot theta; null in Circle mode
    double sign;         // +1 hyperbolic, -1 de Sitter
};

struct WarpedOutput {
    double* v;      // sqrt(1 + sign * phi'^2)
    double* phi1;   // phi' = u' / th
    double* kprof;
    double* kang;   // untouched when cot is null
};

struct KernelTable {
    const char* name;
    // ext points at f_0 of a ghost-extended array (ext[-2] and ext[m+1] valid).
    void (*d1)(const double* ext, double* out, std::size_t m, double inv_12h);
    void (*d2)(const double* ext, double* out, std::size_t m, double inv_12h2);
    // kappa = (sign * thd - X) / (v * th), X = phi'' / v^2 (profile) or cot * phi' (angular).
    void (*warped_curvature)(const WarpedInput& in, const WarpedOutput& out, std::size_t m);
    void (*axpy)(double a, const double* x, double* y, std::size_t m);
    // out = u + (dt/6) (k1 + 2 k2 + 2 k3 + k4)
    void (*rk4_combine)(const double* u, const double* k1, const double* k2, const double* k3, const double* k4,
                        double dt, double* out, std::size_t m);
    // Blocked over 4 lanes: lane sums, then (l0 + l1) + (l2 + l3), then the tail.
    double (*weighted_sum)(const double* w, const double* f, std::size_t m);
};

const KernelTable& scalar_kernels();

/// Null when the binary or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table chosen at first use: AVX2 when available, unless DUALFLOW_SIMD=scalar.
const KernelTable& active_kernels();

/// Overrides the active table ("scalar" or "avx2"); returns false if unavailable.
bool select_kernels(std::string_view name);

}  // namespace dualflow::simd
