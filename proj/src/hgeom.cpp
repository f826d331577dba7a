#include "dualflow/hgeom.hpp"

#include "dualflow/errors.hpp"
#include "geometry_kernel.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace dualflow {

namespace {

constexpr double kPi = std::numbers::pi;

double golden_max(const std::function<double(double)>& f, double a, double b, int iters = 100) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-13; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

bool unimodal_max(const std::vector<double>& y) {
    std::size_t k = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    for (std::size_t i = 1; i <= k; ++i)
        if (y[i] < y[i - 1]) return false;
    for (std::size_t i = k + 1; i < y.size(); ++i)
        if (y[i] > y[i - 1]) return false;
    return true;
}

struct Optimum {
    double arg;
    double value;
    bool fallback;
};

// Maximizes f over [a, b]: coarse scan, golden section around the best sample, dense scan if the
// coarse samples are not unimodal.
Optimum maximize_1d(const std::function<double(double)>& f, double a, double b) {
    constexpr int coarse = 33;
    std::vector<double> ys(coarse);
    const double step = (b - a) / (coarse - 1);
    for (int i = 0; i < coarse; ++i) ys[static_cast<std::size_t>(i)] = f(a + i * step);
    const int k = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    if (!unimodal_max(ys)) {
        constexpr int dense = 2001;
        const double ds = (b - a) / (dense - 1);
        Optimum best{a, -std::numeric_limits<double>::infinity(), true};
        for (int i = 0; i < dense; ++i) {
            const double s = a + i * ds;
            const double y = f(s);
            if (y > best.value) best = {s, y, true};
        }
        const double s = golden_max(f, std::max(a, best.arg - ds), std::min(b, best.arg + ds));
        if (f(s) > best.value) best = {s, f(s), true};
        return best;
    }
    const double lo = a + std::max(0, k - 1) * step, hi = a + std::min(coarse - 1, k + 1) * step;
    const double s = golden_max(f, lo, hi);
    return {s, f(s), false};
}

// Surface samples (cosh u, sinh u sin theta, sinh u cos theta) on a refined set of angles.
struct SurfaceSamples {
    std::vector<double> x0, x1, xa;
};

SurfaceSamples surface_samples(const HyperbolicGraph& g, int refine) {
    const Grid& gr = g.grid();
    const int M = gr.m * refine;
    std::vector<double> theta(static_cast<std::size_t>(M));
    const double span = gr.span();
    for (int i = 0; i < M; ++i)
        theta[static_cast<std::size_t>(i)] =
            gr.mode == GridMode::Circle ? span * i / M : span * (i + 0.5) / M;
    auto u = interpolate_at(g.u, theta);
    SurfaceSamples s;
    for (int i = 0; i < M; ++i) {
        const double ui = u[static_cast<std::size_t>(i)], t = theta[static_cast<std::size_t>(i)];
        s.x0.push_back(std::cosh(ui));
        s.x1.push_back(std::sinh(ui) * std::sin(t));
        s.xa.push_back(std::sinh(ui) * std::cos(t));
    }
    if (gr.mode == GridMode::Axisym) {
        // Poles are not grid nodes; include them explicitly.
        for (bool north : {true, false}) {
            const double up = pole_value(g.u, north);
            s.x0.push_back(std::cosh(up));
            s.x1.push_back(0.0);
            s.xa.push_back(north ? std::sinh(up) : -std::sinh(up));
        }
    }
    return s;
}

// min and max of the distance from P = (p0, p1, pa) to the samples.
std::pair<double, double> distance_range(const SurfaceSamples& s, double p0, double p1, double pa) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < s.x0.size(); ++i) {
        const double c = p0 * s.x0[i] - p1 * s.x1[i] - pa * s.xa[i];
        const double d = std::acosh(std::max(1.0, c));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

}  // namespace

HyperbolicGraph::HyperbolicGraph(ScalarField field) : u(std::move(field)) {
    for (std::size_t j = 0; j < u.size(); ++j)
        if (!(u.values[j] > 0.0) || !std::isfinite(u.values[j]))
            throw DomainError("radial function must be positive and finite; node " + std::to_string(j) + " has " +
                              std::to_string(u.values[j]));
    u.parity = u.grid.even_parity();
}

std::vector<double> GraphGeometry::kappa_at(int j) const {
    std::vector<double> k(static_cast<std::size_t>(grid.n));
    kappa_at(j, k.data());
    return k;
}

void GraphGeometry::kappa_at(int j, double* out) const {
    const auto jj = static_cast<std::size_t>(j);
    out[0] = kappa_profile[jj];
    for (int i = 1; i < grid.n; ++i) out[i] = kappa_angular[jj];
}

double GraphGeometry::min_kappa(int j) const {
    const auto jj = static_cast<std::size_t>(j);
    return kappa_angular.empty() ? kappa_profile[jj] : std::min(kappa_profile[jj], kappa_angular[jj]);
}

double GraphGeometry::max_kappa(int j) const {
    const auto jj = static_cast<std::size_t>(j);
    return kappa_angular.empty() ? kappa_profile[jj] : std::max(kappa_profile[jj], kappa_angular[jj]);
}

namespace detail {

GraphGeometry assemble_geometry(const GeometryWorkspace& ws, std::span<const double> u, double sign,
                                const CurvatureFunction* F) {
    GraphGeometry geo;
    geo.grid = ws.grid;
    const int n = ws.grid.n;
    const auto m = u.size();
    const bool axisym = ws.grid.mode == GridMode::Axisym;
    geo.v = ws.v;
    geo.phi1 = ws.phi1;
    geo.kappa_profile = ws.kprof;
    if (axisym) geo.kappa_angular = ws.kang;
    if (sign > 0) {
        geo.chi.resize(m);
        for (std::size_t j = 0; j < m; ++j) geo.chi[j] = ws.v[j] / ws.th[j];
    }
    geo.H.resize(m);
    geo.normA2.resize(m);
    geo.strictly_convex = true;
    geo.horoconvex = true;
    for (std::size_t j = 0; j < m; ++j) {
        const double kp = ws.kprof[j];
        const double ka = axisym ? ws.kang[j] : 0.0;
        geo.H[j] = kp + (n - 1) * ka;
        geo.normA2[j] = kp * kp + (n - 1) * ka * ka;
        const double lo = axisym ? std::min(kp, ka) : kp;
        if (!(lo > 0.0) && geo.strictly_convex) {
            geo.strictly_convex = false;
            geo.first_nonconvex = static_cast<int>(j);
        }
        if (!(lo >= 1.0)) geo.horoconvex = false;
    }
    if (F) {
        geo.F.assign(m, std::numeric_limits<double>::quiet_NaN());
        double k[kMaxDimension];
        for (std::size_t j = 0; j < m; ++j) {
            geo.kappa_at(static_cast<int>(j), k);
            bool ok = true;
            for (int i = 0; i < n; ++i) ok = ok && k[i] > 0.0;
            if (ok) geo.F[j] = F->value(std::span<const double>(k, static_cast<std::size_t>(n)));
        }
    }
    return geo;
}

}  // namespace detail

GraphGeometry geometry_of(const HyperbolicGraph& g, const CurvatureFunction* F) {
    detail::GeometryWorkspace ws(g.grid());
    ws.compute(g.u.values, +1.0);
    return detail::assemble_geometry(ws, g.u.values, +1.0, F);
}

double minkowski_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = -a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> direction(int n, double theta) {
    std::vector<double> w(static_cast<std::size_t>(n + 1), 0.0);
    w[0] = std::sin(theta);
    w[static_cast<std::size_t>(n)] = std::cos(theta);
    return w;
}

Embedded embed_point(int n, double theta, double u, double du) {
    const auto N = static_cast<std::size_t>(n + 2);
    const double su = std::sinh(u), cu = std::cosh(u);
    const double p = du / su;
    const double v = std::sqrt(1.0 + p * p);
    const double st = std::sin(theta), ct = std::cos(theta);
    Embedded e;
    e.position.coords.assign(N, 0.0);
    e.normal.coords.assign(N, 0.0);
    e.position.causal_type = CausalType::Timelike;
    e.normal.causal_type = CausalType::Spacelike;
    e.position.coords[0] = cu;
    e.position.coords[1] = su * st;
    e.position.coords[N - 1] = su * ct;
    e.normal.coords[0] = su / v;
    e.normal.coords[1] = (cu * st - p * ct) / v;
    e.normal.coords[N - 1] = (cu * ct + p * st) / v;
    return e;
}

Embedded embed(const HyperbolicGraph& g, int node) {
    if (node < 0 || node >= g.grid().m) throw DomainError("node index out of range: " + std::to_string(node));
    const auto du = differentiate(g.u, 1);
    const auto j = static_cast<std::size_t>(node);
    return embed_point(g.n(), g.grid().node(node), g.u.values[j], du.values[j]);
}

std::vector<EuclideanRecord> euclidean_compare(const HyperbolicGraph& g) {
    const auto geo = geometry_of(g);
    const auto du = differentiate(g.u, 1);
    const auto d2u = differentiate(g.u, 2);
    const bool axisym = g.grid().mode == GridMode::Axisym;
    std::vector<EuclideanRecord> out;
    for (int j = 0; j < g.grid().m; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double u = g.u.values[jj], u1 = du.values[jj], u2 = d2u.values[jj];
        const double th = g.grid().node(j);
        const double r = std::tanh(u);
        if (!(r < 1.0)) throw NumericalConsistencyError("Euclidean radius reached 1");
        const double sech2 = 1.0 - r * r;
        const double r1 = sech2 * u1;
        const double r2 = sech2 * (u2 - 2.0 * r * u1 * u1);
        const double root = std::sqrt(r * r + r1 * r1);
        const double su = std::sinh(u);
        const double v = geo.v[jj];
        const double phi1 = geo.phi1[jj];

        EuclideanRecord rec{};
        rec.r = r;
        rec.v = v;
        rec.v_e = std::sqrt(1.0 + sech2 * phi1 * phi1);
        const double ht = (r * r + 2.0 * r1 * r1 - r * r2) / root;
        const double h = geo.kappa_profile[jj] * su * su * v * v;
        rec.h_ratio = ht / h;
        rec.g_ratio = (r * r + r1 * r1) / (su * su + u1 * u1);
        if (axisym) {
            const double st = std::sin(th), ct = std::cos(th);
            const double hta = r * (r * st - r1 * ct) / root;  // divided by sin theta
            const double ha = geo.kappa_angular[jj] * su * su * st;
            rec.h_ratio_angular = hta / ha;
        } else {
            rec.h_ratio_angular = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(rec);
    }
    return out;
}

double translated_sphere_radius(double R, double c, double theta) {
    const double A = std::cosh(c), B = std::sinh(c) * std::cos(theta);
    return std::atanh(B / A) + std::acosh(std::cosh(R) / std::sqrt(A * A - B * B));
}

Radii inradius_circumradius(const HyperbolicGraph& g) {
    const auto s = surface_samples(g, 4);
    Radii out;
    const double umax = g.u.max() * 1.05;
    if (g.grid().mode == GridMode::Axisym) {
        const double top = pole_value(g.u, true), bottom = pole_value(g.u, false);
        const double a = -bottom * 0.999, b = top * 0.999;
        auto in = [&](double x) { return distance_range(s, std::cosh(x), 0.0, std::sinh(x)).first; };
        auto circ = [&](double x) { return -distance_range(s, std::cosh(x), 0.0, std::sinh(x)).second; };
        const auto oi = maximize_1d(in, a, b);
        const auto oc = maximize_1d(circ, a, b);
        out.rho_minus = oi.value;
        out.rho_plus = -oc.value;
        out.center_offset = oc.arg;
        out.center_offset_minus = oi.arg;
        out.fallback_used = oi.fallback || oc.fallback;
        return out;
    }
    // Circle: centre (sqrt(1 + p^2 + q^2), p, q) in the plane; nested one-dimensional searches.
    auto nested = [&](bool inner_ball) {
        bool fallback = false;
        auto sign = inner_ball ? 1.0 : -1.0;
        auto value = [&](double p, double q) {
            const auto [lo, hi] = distance_range(s, std::sqrt(1.0 + p * p + q * q), p, q);
            return inner_ball ? lo : -hi;
        };
        const double ext = std::sinh(umax);
        auto outer = [&](double p) {
            const auto o = maximize_1d([&](double q) { return value(p, q); }, -ext, ext);
            fallback = fallback || o.fallback;
            return o.value;
        };
        const auto op = maximize_1d(outer, -ext, ext);
        const auto oq = maximize_1d([&](double q) { return value(op.arg, q); }, -ext, ext);
        const double offset = std::asinh(std::hypot(op.arg, oq.arg));
        return std::tuple{sign * oq.value, offset, fallback || op.fallback || oq.fallback};
    };
    const auto [rm, om, fm] = nested(true);
    const auto [rp, op, fp] = nested(false);
    out.rho_minus = rm;
    out.rho_plus = rp;
    out.center_offset = op;
    out.center_offset_minus = om;
    out.fallback_used = fm || fp;
    return out;
}

HyperbolicGraph recenter(const HyperbolicGraph& g, double s) {
    const Grid& gr = g.grid();
    if (gr.mode != GridMode::Axisym) throw ConstructionError("recenter needs an axisymmetric grid");
    const double cs = std::cosh(s), ss = std::sinh(s);
    const double reach = 2.0 * g.u.max() + std::abs(s) + 1.0;
    std::vector<double> out(static_cast<std::size_t>(gr.m));
    for (int j = 0; j < gr.m; ++j) {
        const double t = gr.node(j), ct = std::cos(t), st = std::sin(t);
        // Q(d) = cosh d P_s + sinh d (cos t e_axis + sin t e_1)
        auto gap = [&](double d) {
            const double ch = std::cosh(d), sh = std::sinh(d);
            const double q0 = ch * cs + sh * ct * ss;
            const double q1 = sh * st;
            const double qa = ch * ss + sh * ct * cs;
            const double uq = std::acosh(std::max(1.0, q0));
            double tq = std::atan2(q1, qa);
            tq = std::clamp(tq, 1e-15, kPi - 1e-15);
            const double ug = interpolate_at(g.u, std::span<const double>(&tq, 1))[0];
            return uq - ug;
        };
        double lo = 0.0, hi = reach;
        if (!(gap(lo) < 0.0)) throw DomainError("recentering point lies outside the body");
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        out[static_cast<std::size_t>(j)] = 0.5 * (lo + hi);
    }
    return HyperbolicGraph(ScalarField(gr, std::move(out), Parity::Even));
}

HyperbolicGraph initial_graph(const InitialSpec& spec, const Grid& grid) {
    const auto& p = spec.params;
    auto need = [&](std::size_t k) {
        if (p.size() != k)
            throw ConstructionError("initial datum '" + spec.name + "' expects " + std::to_string(k) +
                                    " parameters, got " + std::to_string(p.size()));
    };
    const Parity par = grid.even_parity();
    if (spec.name == "sphere") {
        need(1);
        return HyperbolicGraph(ScalarField::sample(grid, par, [&](double) { return p[0]; }));
    }
    if (spec.name == "perturbed_sphere") {
        need(3);
        const double k = p[2];
        if (k != std::round(k) || k < 0) throw ConstructionError("perturbed_sphere mode k must be a non-negative integer");
        return HyperbolicGraph(ScalarField::sample(grid, par, [&](double t) { return p[0] + p[1] * std::cos(k * t); }));
    }
    if (spec.name == "translated_sphere") {
        need(2);
        if (!(std::abs(p[1]) < p[0])) throw ConstructionError("translated_sphere needs |c| < R");
        return HyperbolicGraph(
            ScalarField::sample(grid, par, [&](double t) { return translated_sphere_radius(p[0], p[1], t); }));
    }
    if (spec.name == "ellipsoid") {
        need(2);
        if (!(p[0] > 0 && p[0] < 1 && p[1] > 0 && p[1] < 1))
            throw ConstructionError("ellipsoid semi-axes must lie in (0, 1) in the Klein model");
        return HyperbolicGraph(ScalarField::sample(grid, par, [&](double t) {
            const double c = std::cos(t) / p[0], s = std::sin(t) / p[1];
            return std::atanh(1.0 / std::sqrt(c * c + s * s));
        }));
    }
    if (spec.name == "random_convex") {
        need(2);
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> dist(-p[1], p[1]);
        double a[4];
        for (double& x : a) x = dist(rng);
        return HyperbolicGraph(ScalarField::sample(grid, par, [&](double t) {
            double u = p[0];
            for (int k = 1; k <= 4; ++k) u += a[k - 1] * std::cos(k * t) / (k * k);
            return u;
        }));
    }
    throw ConstructionError("unknown initial datum '" + spec.name + "'");
}

}  // namespace dualflow
