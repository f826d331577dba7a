#include "dualflow/sphere_grid.hpp"

#include "dualflow/errors.hpp"
#include "dualflow/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dualflow {

namespace {

constexpr double kPi = std::numbers::pi;

double parity_sign(Parity p) { return p == Parity::Odd ? -1.0 : 1.0; }

// Data extended across the poles (Axisym) or by one period each way (Circle).
struct Extended {
    std::vector<double> x;
    std::vector<double> y;
};

Extended extend_data(std::span<const double> x, std::span<const double> y, const Grid& g, Parity parity) {
    const std::size_t m = x.size();
    if (y.size() != m) throw ReparametrizationError("abscissae and values differ in length");
    if (m < 2) throw ReparametrizationError("need at least two samples to resample");
    for (std::size_t j = 1; j < m; ++j)
        if (!(x[j] > x[j - 1]))
            throw ReparametrizationError("abscissae not strictly increasing at index " + std::to_string(j));

    Extended e;
    e.x.reserve(3 * m);
    e.y.reserve(3 * m);
    if (g.mode == GridMode::Circle || parity == Parity::Periodic) {
        const double period = 2.0 * kPi;
        if (!(x[m - 1] - x[0] < period)) throw ReparametrizationError("abscissae wrap more than one period");
        for (int shift = -1; shift <= 1; ++shift)
            for (std::size_t j = 0; j < m; ++j) {
                e.x.push_back(x[j] + shift * period);
                e.y.push_back(y[j]);
            }
    } else {
        if (!(x[0] > 0.0) || !(x[m - 1] < kPi))
            throw ReparametrizationError("polar abscissae must lie strictly inside (0, pi)");
        const double s = parity_sign(parity);
        for (std::size_t j = m; j-- > 0;) {
            e.x.push_back(-x[j]);
            e.y.push_back(s * y[j]);
        }
        for (std::size_t j = 0; j < m; ++j) {
            e.x.push_back(x[j]);
            e.y.push_back(y[j]);
        }
        for (std::size_t j = m; j-- > 0;) {
            e.x.push_back(2.0 * kPi - x[j]);
            e.y.push_back(s * y[j]);
        }
    }
    return e;
}

// Index k with X[k] <= t < X[k+1], clamped to [lo, hi].
std::size_t locate(const std::vector<double>& X, double t, std::size_t lo, std::size_t hi) {
    auto it = std::upper_bound(X.begin(), X.end(), t);
    std::size_t k = it == X.begin() ? 0 : static_cast<std::size_t>(it - X.begin()) - 1;
    return std::clamp(k, lo, hi);
}

double lagrange6(const Extended& e, double t) {
    const std::size_t N = e.x.size();
    const std::size_t k = locate(e.x, t, 2, N - 4);
    double s = 0.0;
    for (std::size_t a = k - 2; a <= k + 3; ++a) {
        double w = 1.0;
        for (std::size_t b = k - 2; b <= k + 3; ++b)
            if (b != a) w *= (t - e.x[b]) / (e.x[a] - e.x[b]);
        s += w * e.y[a];
    }
    return s;
}

// Fritsch-Butland weighted harmonic slopes (zero at local extrema of the data).
std::vector<double> pchip_slopes(const Extended& e) {
    const std::size_t N = e.x.size();
    std::vector<double> hk(N - 1), dk(N - 1), d(N, 0.0);
    for (std::size_t k = 0; k + 1 < N; ++k) {
        hk[k] = e.x[k + 1] - e.x[k];
        dk[k] = (e.y[k + 1] - e.y[k]) / hk[k];
    }
    for (std::size_t k = 1; k + 1 < N; ++k) {
        if (dk[k - 1] * dk[k] <= 0.0) continue;
        const double w1 = 2.0 * hk[k] + hk[k - 1];
        const double w2 = hk[k] + 2.0 * hk[k - 1];
        d[k] = (w1 + w2) / (w1 / dk[k - 1] + w2 / dk[k]);
    }
    d[0] = dk[0];
    d[N - 1] = dk[N - 2];
    return d;
}

double hermite(const Extended& e, const std::vector<double>& d, double t) {
    const std::size_t k = locate(e.x, t, 0, e.x.size() - 2);
    const double hk = e.x[k + 1] - e.x[k];
    const double s = (t - e.x[k]) / hk;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * e.y[k] + h10 * hk * d[k] + h01 * e.y[k + 1] + h11 * hk * d[k + 1];
}

}  // namespace

Grid Grid::circle(int m) {
    if (m < 16) throw ConstructionError("grid needs m >= 16 nodes, got " + std::to_string(m));
    return Grid{GridMode::Circle, 1, m, 2.0 * kPi / m};
}

Grid Grid::axisym(int n, int m) {
    if (m < 16) throw ConstructionError("grid needs m >= 16 nodes, got " + std::to_string(m));
    if (n < 2) throw ConstructionError("axisymmetric grids need n >= 2, got " + std::to_string(n));
    return Grid{GridMode::Axisym, n, m, kPi / m};
}

Grid Grid::for_dimension(int n, int m) { return n == 1 ? circle(m) : axisym(n, m); }

std::vector<double> Grid::nodes() const {
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) t[static_cast<std::size_t>(j)] = node(j);
    return t;
}

double Grid::span() const noexcept { return mode == GridMode::Circle ? 2.0 * kPi : kPi; }

ScalarField::ScalarField(Grid g, std::vector<double> v, Parity p) : grid(g), values(std::move(v)), parity(p) {
    if (static_cast<int>(values.size()) != grid.m)
        throw ConstructionError("field has " + std::to_string(values.size()) + " values on a grid of " +
                                std::to_string(grid.m) + " nodes");
    if (grid.mode == GridMode::Circle) parity = Parity::Periodic;
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

void extend_with_ghosts(const Grid& g, Parity p, std::span<const double> f, std::vector<double>& ext) {
    const std::size_t m = f.size();
    ext.resize(m + 4);
    std::copy(f.begin(), f.end(), ext.begin() + 2);
    if (g.mode == GridMode::Circle || p == Parity::Periodic) {
        ext[0] = f[m - 2];
        ext[1] = f[m - 1];
        ext[m + 2] = f[0];
        ext[m + 3] = f[1];
    } else {
        const double s = parity_sign(p);
        ext[1] = s * f[0];
        ext[0] = s * f[1];
        ext[m + 2] = s * f[m - 1];
        ext[m + 3] = s * f[m - 2];
    }
}

void differentiate_into(const Grid& g, Parity p, std::span<const double> f, int order, std::span<double> out,
                        std::vector<double>& ext) {
    extend_with_ghosts(g, p, f, ext);
    const auto& k = simd::active_kernels();
    if (order == 1)
        k.d1(ext.data() + 2, out.data(), f.size(), 1.0 / (12.0 * g.h));
    else
        k.d2(ext.data() + 2, out.data(), f.size(), 1.0 / (12.0 * g.h * g.h));
}

ScalarField differentiate(const ScalarField& f, int order) {
    if (order != 1 && order != 2) throw ConstructionError("derivative order must be 1 or 2");
    std::vector<double> out(f.size()), ext;
    differentiate_into(f.grid, f.parity, f.values, order, out, ext);
    Parity p = f.parity;
    if (order == 1 && p == Parity::Even)
        p = Parity::Odd;
    else if (order == 1 && p == Parity::Odd)
        p = Parity::Even;
    return ScalarField(f.grid, std::move(out), p);
}

double sphere_area(int k) {
    const double a = 0.5 * (k + 1);
    return 2.0 * std::pow(kPi, a) / std::tgamma(a);
}

std::vector<double> quadrature_weights(const Grid& g) {
    const auto m = static_cast<std::size_t>(g.m);
    std::vector<double> w(m, g.h);
    if (g.mode == GridMode::Circle) return w;
    const double area = sphere_area(g.n - 1);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = g.node(static_cast<int>(j));
        if (g.n % 2 == 0) {
            // Fejer's first rule in x = cos(theta) absorbs one power of sin(theta) exactly.
            double s = 0.0;
            for (int k = 1; k <= g.m / 2; ++k) s += std::cos(2.0 * k * t) / (4.0 * k * k - 1.0);
            w[j] = (2.0 / g.m) * (1.0 - 2.0 * s) * std::pow(std::sin(t), g.n - 2);
        } else {
            w[j] = g.h * std::pow(std::sin(t), g.n - 1);
        }
        w[j] *= area;
    }
    return w;
}

double integrate_sphere(const Grid& g, std::span<const double> f) {
    const auto w = quadrature_weights(g);
    return simd::active_kernels().weighted_sum(w.data(), f.data(), f.size());
}

double integrate_sphere(const ScalarField& f) { return integrate_sphere(f.grid, f.values); }

ScalarField resample_monotone(std::span<const double> x, std::span<const double> y, const Grid& target,
                              Parity parity) {
    const Extended e = extend_data(x, y, target, parity);
    const auto d = pchip_slopes(e);
    return ScalarField::sample(target, parity, [&](double t) { return hermite(e, d, t); });
}

ScalarField resample_high_order(std::span<const double> x, std::span<const double> y, const Grid& target,
                                Parity parity) {
    const Extended e = extend_data(x, y, target, parity);
    return ScalarField::sample(target, parity, [&](double t) { return lagrange6(e, t); });
}

std::vector<double> interpolate_at(const ScalarField& f, std::span<const double> theta) {
    const auto nodes = f.grid.nodes();
    const Extended e = extend_data(nodes, f.values, f.grid, f.parity);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = lagrange6(e, theta[i]);
    return out;
}

Extremum refine_extremum(const ScalarField& f, bool maximum) {
    const auto nodes = f.grid.nodes();
    const Extended e = extend_data(nodes, f.values, f.grid, f.parity);
    const double sgn = maximum ? -1.0 : 1.0;
    const auto it = maximum ? std::max_element(f.values.begin(), f.values.end())
                            : std::min_element(f.values.begin(), f.values.end());
    const int j = static_cast<int>(it - f.values.begin());
    auto g = [&](double t) { return sgn * lagrange6(e, t); };

    double a = f.grid.node(j) - f.grid.h, b = f.grid.node(j) + f.grid.h;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    for (int it2 = 0; it2 < 80 && (b - a) > 1e-13; ++it2) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    const double t = 0.5 * (a + b);
    Extremum best{t, lagrange6(e, t)};
    // The node itself wins if the interpolant search did not improve on it.
    if (sgn * f.values[static_cast<std::size_t>(j)] < sgn * best.value) best = {f.grid.node(j), *it};
    return best;
}

double pole_value(const ScalarField& f, bool north) {
    if (f.grid.mode != GridMode::Axisym) throw ConstructionError("pole_value needs an axisymmetric grid");
    const auto m = f.values.size();
    const double s = parity_sign(f.parity);
    double t[6], y[6];
    for (int i = 0; i < 3; ++i) {
        const double ti = f.grid.node(i);
        const double yi = north ? f.values[static_cast<std::size_t>(i)] : f.values[m - 1 - static_cast<std::size_t>(i)];
        t[2 * i] = ti;
        y[2 * i] = yi;
        t[2 * i + 1] = -ti;
        y[2 * i + 1] = s * yi;
    }
    double v = 0.0;
    for (int a = 0; a < 6; ++a) {
        double w = 1.0;
        for (int b = 0; b < 6; ++b)
            if (b != a) w *= (0.0 - t[b]) / (t[a] - t[b]);
        v += w * y[a];
    }
    return v;
}

}  // namespace dualflow
