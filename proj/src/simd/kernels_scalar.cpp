#include "dualflow/simd/kernels.hpp"

#include <cmath>

namespace dualflow::simd {

namespace {

void d1_scalar(const double* f, double* out, std::size_t m, double inv_12h) {
    for (std::size_t j = 0; j < m; ++j) {
        const double a = (f[j + 1] - f[j - 1]) * 8.0;
        const double b = f[j - 2] - f[j + 2];
        out[j] = (a + b) * inv_12h;
    }
}

// Summation order keeps the stencil exactly zero on constant data.
void d2_scalar(const double* f, double* out, std::size_t m, double inv_12h2) {
    for (std::size_t j = 0; j < m; ++j) {
        const double near = (f[j - 1] + f[j + 1]) * 16.0;
        const double far = f[j - 2] + f[j + 2];
        out[j] = ((near - far) - f[j] * 30.0) * inv_12h2;
    }
}

void warped_scalar(const WarpedInput& in, const WarpedOutput& out, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) {
        const double th = in.th[j];
        const double thd = in.thd[j];
        const double u1 = in.u1[j];
        const double p = u1 / th;
        const double q = in.u2[j] / th - (thd * u1 * u1) / (th * th);
        const double v2 = 1.0 + in.sign * (p * p);
        const double v = std::sqrt(v2);
        const double den = v * th;
        const double lead = in.sign * thd;
        out.v[j] = v;
        out.phi1[j] = p;
        out.kprof[j] = (lead - q / v2) / den;
        if (in.cot) out.kang[j] = (lead - in.cot[j] * p) / den;
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) y[j] = y[j] + a * x[j];
}

void rk4_scalar(const double* u, const double* k1, const double* k2, const double* k3, const double* k4, double dt,
                double* out, std::size_t m) {
    const double c = dt / 6.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double s = (k1[j] + 2.0 * k2[j]) + (2.0 * k3[j] + k4[j]);
        out[j] = u[j] + c * s;
    }
}

double wsum_scalar(const double* w, const double* f, std::size_t m) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        l0 += w[j] * f[j];
        l1 += w[j + 1] * f[j + 1];
        l2 += w[j + 2] * f[j + 2];
        l3 += w[j + 3] * f[j + 3];
    }
    double s = (l0 + l1) + (l2 + l3);
    for (; j < m; ++j) s += w[j] * f[j];
    return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", d1_scalar, d2_scalar, warped_scalar, axpy_scalar, rk4_scalar, wsum_scalar};
    return table;
}

}  // namespace dualflow::simd
