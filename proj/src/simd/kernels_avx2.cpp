#include "dualflow/simd/kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define DUALFLOW_HAVE_AVX2_TU 1
#endif

namespace dualflow::simd {

#ifdef DUALFLOW_HAVE_AVX2_TU

namespace {

#define AVX2 __attribute__((target("avx2")))

AVX2 void d1_avx2(const double* f, double* out, std::size_t m, double inv_12h) {
    const __m256d eight = _mm256_set1_pd(8.0);
    const __m256d s = _mm256_set1_pd(inv_12h);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d a = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(f + j + 1), _mm256_loadu_pd(f + j - 1)), eight);
        const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(f + j - 2), _mm256_loadu_pd(f + j + 2));
        _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_add_pd(a, b), s));
    }
    for (; j < m; ++j) {
        const double a = (f[j + 1] - f[j - 1]) * 8.0;
        const double b = f[j - 2] - f[j + 2];
        out[j] = (a + b) * inv_12h;
    }
}

AVX2 void d2_avx2(const double* f, double* out, std::size_t m, double inv_12h2) {
    const __m256d sixteen = _mm256_set1_pd(16.0);
    const __m256d thirty = _mm256_set1_pd(30.0);
    const __m256d s = _mm256_set1_pd(inv_12h2);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d near = _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(f + j - 1), _mm256_loadu_pd(f + j + 1)), sixteen);
        const __m256d far = _mm256_add_pd(_mm256_loadu_pd(f + j - 2), _mm256_loadu_pd(f + j + 2));
        const __m256d c = _mm256_mul_pd(_mm256_loadu_pd(f + j), thirty);
        _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_sub_pd(_mm256_sub_pd(near, far), c), s));
    }
    for (; j < m; ++j) {
        const double near = (f[j - 1] + f[j + 1]) * 16.0;
        const double far = f[j - 2] + f[j + 2];
        out[j] = ((near - far) - f[j] * 30.0) * inv_12h2;
    }
}

AVX2 void warped_avx2(const WarpedInput& in, const WarpedOutput& out, std::size_t m) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(in.sign);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d th = _mm256_loadu_pd(in.th + j);
        const __m256d thd = _mm256_loadu_pd(in.thd + j);
        const __m256d u1 = _mm256_loadu_pd(in.u1 + j);
        const __m256d p = _mm256_div_pd(u1, th);
        const __m256d num = _mm256_mul_pd(_mm256_mul_pd(thd, u1), u1);
        const __m256d q = _mm256_sub_pd(_mm256_div_pd(_mm256_loadu_pd(in.u2 + j), th),
                                        _mm256_div_pd(num, _mm256_mul_pd(th, th)));
        const __m256d v2 = _mm256_add_pd(one, _mm256_mul_pd(sign, _mm256_mul_pd(p, p)));
        const __m256d v = _mm256_sqrt_pd(v2);
        const __m256d den = _mm256_mul_pd(v, th);
        const __m256d lead = _mm256_mul_pd(sign, thd);
        _mm256_storeu_pd(out.v + j, v);
        _mm256_storeu_pd(out.phi1 + j, p);
        _mm256_storeu_pd(out.kprof + j, _mm256_div_pd(_mm256_sub_pd(lead, _mm256_div_pd(q, v2)), den));
        if (in.cot) {
            const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(in.cot + j), p);
            _mm256_storeu_pd(out.kang + j, _mm256_div_pd(_mm256_sub_pd(lead, x), den));
        }
    }
    for (; j < m; ++j) {
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

AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t m) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4)
        _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j), _mm256_mul_pd(av, _mm256_loadu_pd(x + j))));
    for (; j < m; ++j) y[j] = y[j] + a * x[j];
}

AVX2 void rk4_avx2(const double* u, const double* k1, const double* k2, const double* k3, const double* k4, double dt,
                   double* out, std::size_t m) {
    const double c = dt / 6.0;
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(k1 + j), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + j)));
        const __m256d b = _mm256_add_pd(_mm256_mul_pd(two, _mm256_loadu_pd(k3 + j)), _mm256_loadu_pd(k4 + j));
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(u + j), _mm256_mul_pd(cv, _mm256_add_pd(a, b))));
    }
    for (; j < m; ++j) {
        const double s = (k1[j] + 2.0 * k2[j]) + (2.0 * k3[j] + k4[j]);
        out[j] = u[j] + c * s;
    }
}

AVX2 double wsum_avx2(const double* w, const double* f, std::size_t m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + j), _mm256_loadu_pd(f + j)));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; j < m; ++j) s += w[j] * f[j];
    return s;
}

#undef AVX2

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{"avx2", d1_avx2, d2_avx2, warped_avx2, axpy_avx2, rk4_avx2, wsum_avx2};
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace dualflow::simd
