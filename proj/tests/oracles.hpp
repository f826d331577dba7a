#pragma once

// Independent reference computations for the tests. Nothing here calls into the
// library: curvatures come from finite differences of the Minkowski embedding of
// an analytic profile, in the plane (x0, x1, x_axis) of the profile curve.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec3 = std::array<double, 3>;  // (x0, x1, x_axis)
using Profile = std::function<double(double)>;

inline double mdot(const Vec3& a, const Vec3& b) { return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// N with <N, a> = <N, b> = 0: the Euclidean cross product with the time component negated.
inline Vec3 mcross(const Vec3& a, const Vec3& b) {
    return {-(a[1] * b[2] - a[2] * b[1]), a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// 6th-order central differences of a vector-valued curve.
template <class Curve>
void derivatives(const Curve& X, double th, double e, Vec3& d1, Vec3& d2) {
    const Vec3 p1 = X(th + e), m1 = X(th - e), p2 = X(th + 2 * e), m2 = X(th - 2 * e), p3 = X(th + 3 * e),
               m3 = X(th - 3 * e), c = X(th);
    for (int i = 0; i < 3; ++i) {
        d1[i] = (45 * (p1[i] - m1[i]) - 9 * (p2[i] - m2[i]) + (p3[i] - m3[i])) / (60 * e);
        d2[i] = (270 * (p1[i] + m1[i]) - 27 * (p2[i] + m2[i]) + 2 * (p3[i] + m3[i]) - 490 * c[i]) / (180 * e * e);
    }
}

struct Curvatures {
    double profile;
    double angular;
    double nu0;  // time component of the unit normal (hyperbolic) or of the dual point
};

// Hyperbolic graph X = (cosh u, sinh u sin th, sinh u cos th) with exterior normal.
inline Curvatures hyperbolic(const Profile& u, double th, double e = 1e-2) {
    auto X = [&](double s) {
        const double r = u(s);
        return Vec3{std::cosh(r), std::sinh(r) * std::sin(s), std::sinh(r) * std::cos(s)};
    };
    Vec3 d1, d2;
    derivatives(X, th, e, d1, d2);
    const Vec3 x = X(th);
    Vec3 nu = mcross(x, d1);
    const double len = std::sqrt(mdot(nu, nu));
    for (double& c : nu) c /= len;
    if (nu[1] * std::sin(th) + nu[2] * std::cos(th) < 0)
        for (double& c : nu) c = -c;
    return {-mdot(d2, nu) / mdot(d1, d1), nu[1] / x[1], nu[0]};
}

// Spacelike de Sitter graph Y = (-sinh u*, cosh u* sin th, cosh u* cos th) (eigentime -u*);
// curvatures relative to the future timelike unit normal x, h = -<Y_thth, x>.
inline Curvatures desitter(const Profile& us, double th, double e = 1e-2) {
    auto Y = [&](double s) {
        const double r = us(s);
        return Vec3{-std::sinh(r), std::cosh(r) * std::sin(s), std::cosh(r) * std::cos(s)};
    };
    Vec3 d1, d2;
    derivatives(Y, th, e, d1, d2);
    const Vec3 y = Y(th);
    Vec3 x = mcross(y, d1);
    const double len = std::sqrt(-mdot(x, x));
    for (double& c : x) c /= len;
    if (x[0] < 0)
        for (double& c : x) c = -c;
    return {-mdot(d2, x) / mdot(d1, d1), x[1] / y[1], x[0]};
}

// Elementary symmetric polynomial by brute force over subsets.
inline double esym(const std::vector<double>& k, int r) {
    const int n = static_cast<int>(k.size());
    double s = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != r) continue;
        double p = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) p *= k[static_cast<std::size_t>(i)];
        s += p;
    }
    return s;
}

inline double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Least-squares slope of log e against log h.
inline double observed_order(const std::vector<double>& hs, const std::vector<double>& es) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]), y = std::log(es[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> random_cone_point(std::mt19937_64& rng, int n, double lo = 0.2, double hi = 5.0) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    std::vector<double> k(static_cast<std::size_t>(n));
    for (double& x : k) x = std::exp(d(rng));
    return k;
}

}  // namespace oracle
