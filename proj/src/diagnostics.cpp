#include "dualflow/diagnostics.hpp"

#include "dualflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dualflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
    double slope, intercept, rms;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double icpt = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (icpt + slope * x[i]);
        ss += r * r;
    }
    return {slope, icpt, std::sqrt(ss / n)};
}

}  // namespace

double pinching_epsilon(const GraphGeometry& geo) {
    const int n = geo.n();
    double eps = std::numeric_limits<double>::infinity();
    for (int j = 0; j < geo.grid.m; ++j) {
        const double k1 = geo.min_kappa(j) - 1.0;
        if (k1 < 0.0) return 0.0;
        const double spread = std::max(geo.H[static_cast<std::size_t>(j)] - n, 1e-300);
        eps = std::min(eps, k1 / spread);
    }
    return std::isfinite(eps) ? 0.5 * eps : 0.0;
}

DiagnosticsRecord compute_record(const FlowState& state, const CurvatureFunction& F, const DeSitterGraph* dual,
                                 double Theta, double tau, double epsilon, double sigma) {
    const auto& geo = state.geometry;
    const int n = geo.n();
    const auto m = state.u.size();
    DiagnosticsRecord r;
    r.t = state.t;
    r.tau = tau;
    r.u_min = state.u.min();
    r.u_max = state.u.max();
    r.pinch_ratio = 1.0;
    r.horoconvex_margin = r.pinching_T = std::numeric_limits<double>::infinity();
    r.f_sigma_max = r.A2_minus_nF2_max = -std::numeric_limits<double>::infinity();

    std::vector<double> Fv = geo.F;
    if (Fv.size() != m) Fv = geometry_of(HyperbolicGraph(state.u), &F).F;
    std::vector<double> f2(m), f8(m);
    double Fmin = std::numeric_limits<double>::infinity(), Fmax = -Fmin;
    r.F_tilde_dev = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const int jj = static_cast<int>(j);
        const double kmin = geo.min_kappa(jj), kmax = geo.max_kappa(jj);
        r.pinch_ratio = std::min(r.pinch_ratio, kmin / kmax);
        r.horoconvex_margin = std::min(r.horoconvex_margin, kmin - 1.0);
        r.pinching_T = std::min(r.pinching_T, kmin - 1.0 - epsilon * (geo.H[j] - n));
        const double f = Fv[j];
        Fmin = std::min(Fmin, f);
        Fmax = std::max(Fmax, f);
        r.F_tilde_dev = std::max(r.F_tilde_dev, std::abs(f * Theta - 1.0));
        const double gap = geo.normA2[j] - n * f * f;
        r.A2_minus_nF2_max = std::max(r.A2_minus_nF2_max, gap);
        const double fs = std::pow(f, -(2.0 - sigma)) * gap;
        r.f_sigma_max = std::max(r.f_sigma_max, fs);
        f2[j] = fs * fs;
        f8[j] = f2[j] * f2[j] * f2[j] * f2[j];
    }
    r.osc_F_tilde = (Fmax - Fmin) * Theta;
    r.f_sigma_int_p2 = integrate_sphere(state.u.grid, f2);
    r.f_sigma_int_p8 = integrate_sphere(state.u.grid, f8);

    const auto radii = inradius_circumradius(HyperbolicGraph(state.u));
    r.rho_minus = radii.rho_minus;
    r.rho_plus = radii.rho_plus;
    r.center_offset = radii.center_offset;
    r.radii_fallback = radii.fallback_used;

    r.duality_err = r.w_min = r.w_max = kNaN;
    if (dual) {
        try {
            const auto pair = gauss_dual(HyperbolicGraph(state.u));
            double e = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                e = std::max(e, std::abs(pair.dual.u_star.values[j] - dual->u_star.values[j]));
            r.duality_err = e;
        } catch (const std::exception&) {
            r.duality_err = kNaN;
        }
        r.w_min = dual->u_star.min() / Theta;
        r.w_max = dual->u_star.max() / Theta;
    }
    return r;
}

RateFit fit_exponential(std::span<const double> taus, std::span<const double> ys) {
    if (taus.size() != ys.size()) throw DomainError("fit_exponential: length mismatch");
    if (taus.size() < 5) throw DomainError("fit_exponential needs at least 5 samples");
    RateFit fit;
    std::vector<double> ly(ys.size());
    const double floor = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double y = ys[i];
        if (!(y > 0.0)) {
            y = floor;
            fit.clipped = true;
        }
        ly[i] = std::log(y);
    }
    const auto lf = least_squares(taus, ly);
    fit.C = std::exp(lf.intercept);
    fit.delta = -lf.slope;
    fit.residual = lf.rms;
    const auto [lo, hi] = std::minmax_element(ly.begin(), ly.end());
    fit.log_range = *hi - *lo;
    return fit;
}

DecayReport decay_check(const std::vector<FlowState>& states, double c0, double delta) {
    DecayReport rep;
    rep.c0 = c0;
    rep.delta = delta;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const double ratio_tol = 1e-12;
    bool holds = true;
    for (const auto& s : states) {
        const int n = s.geometry.n();
        for (std::size_t j = 0; j < s.geometry.F.size(); ++j) {
            const double f = s.geometry.F[j];
            const double gap = s.geometry.normA2[j] - n * f * f;
            const double bound = c0 * std::pow(f, 2.0 - delta);
            const double margin = bound - gap;
            rep.worst_margin = std::min(rep.worst_margin, margin);
            // Rounding of |A|^2 - n F^2 is relative to |A|^2.
            if (margin < -ratio_tol * s.geometry.normA2[j]) holds = false;
        }
    }
    rep.holds = holds;
    return rep;
}

DecayReport fit_decay(const std::vector<FlowState>& states) {
    std::vector<double> lf, lq;
    double qmax_all = 0.0;
    for (const auto& s : states) {
        const int n = s.geometry.n();
        double qmax = 0.0, Fat = 0.0;
        for (std::size_t j = 0; j < s.geometry.F.size(); ++j) {
            const double f = s.geometry.F[j];
            const double q = (s.geometry.normA2[j] - n * f * f) / (f * f);
            if (q > qmax) {
                qmax = q;
                Fat = f;
            }
        }
        qmax_all = std::max(qmax_all, qmax);
        if (qmax > 1e-13) {
            lf.push_back(std::log(Fat));
            lq.push_back(std::log(qmax));
        }
    }
    DecayReport rep;
    if (qmax_all <= 1e-13 || lf.size() < 3) {
        // Umbilic (or nearly): the left side vanishes to rounding and any c0 > 0 works.
        rep = decay_check(states, 1e-12, 1.0);
        return rep;
    }
    const auto fit = least_squares(lf, lq);
    const double delta = -fit.slope;
    if (!(delta > 0.0)) {
        rep.delta = delta;
        rep.holds = false;
        return rep;
    }
    double c0 = 0.0;
    for (const auto& s : states) {
        const int n = s.geometry.n();
        for (std::size_t j = 0; j < s.geometry.F.size(); ++j) {
            const double f = s.geometry.F[j];
            const double gap = s.geometry.normA2[j] - n * f * f;
            c0 = std::max(c0, gap / std::pow(f, 2.0 - delta));
        }
    }
    return decay_check(states, std::max(c0, 1e-300), delta);
}

double kn_ratio(const CurvatureFunction& F, std::span<const double> kappa) {
    const auto ev = F.evaluate(kappa, 1);
    const double sumF = std::accumulate(ev.gradient.begin(), ev.gradient.end(), 0.0);
    double A2 = 0.0, H = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        A2 += kappa[i] * kappa[i];
        H += kappa[i];
        for (std::size_t j = i + 1; j < kappa.size(); ++j) spread += (kappa[i] - kappa[j]) * (kappa[i] - kappa[j]);
    }
    if (!(spread > 1e-14 * A2)) return kNaN;
    return (sumF * A2 - ev.value * H) / spread;
}

double kn_constant_prescan(const CurvatureFunction& F, int per_axis, double lo, double hi) {
    const int n = F.dimension();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> k(static_cast<std::size_t>(n));
    double C = -std::numeric_limits<double>::infinity();
    while (true) {
        for (int i = 0; i < n; ++i)
            k[static_cast<std::size_t>(i)] = lo + (hi - lo) * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
        const double r = kn_ratio(F, k);
        if (std::isfinite(r)) C = std::max(C, r);
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == per_axis) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == n) break;
    }
    return C;
}

}  // namespace dualflow
