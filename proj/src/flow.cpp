#include "dualflow/flow.hpp"

#include "dualflow/errors.hpp"
#include "dualflow/simd/kernels.hpp"
#include "geometry_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dualflow {

namespace {

// Right-hand side and step restriction for one of the two scalar equations.
class Operator {
public:
    Operator(const Grid& g, const CurvatureFunction& F, double sign) : ws_(g), F_(F), sign_(sign), n_(g.n) {}

    void rhs(std::span<const double> u, std::span<double> out) {
        ws_.compute(u, sign_);
        double k[kMaxDimension];
        for (std::size_t j = 0; j < u.size(); ++j) {
            check_node(j, k);
            const double f = F_.value(std::span<const double>(k, static_cast<std::size_t>(n_)));
            out[j] = sign_ > 0 ? -f * ws_.v[j] : ws_.v[j] / f;
        }
    }

    double stable_dt(std::span<const double> u, double cfl) {
        ws_.compute(u, sign_);
        double k[kMaxDimension];
        double S = 0.0, th_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < u.size(); ++j) {
            check_node(j, k);
            const auto ev = F_.evaluate(std::span<const double>(k, static_cast<std::size_t>(n_)), 1);
            double s = std::accumulate(ev.gradient.begin(), ev.gradient.end(), 0.0);
            // du*/dt = v~/F~ has diffusion sum F~_i / (F~^2 v~^2) in the dual equation.
            if (sign_ < 0) s /= ev.value * ev.value * ws_.v[j] * ws_.v[j];
            S = std::max(S, s);
            th_min = std::min(th_min, std::abs(ws_.th[j]));
        }
        const double h = ws_.grid.h;
        return cfl * (h * th_min) * (h * th_min) / S;
    }

private:
    void check_node(std::size_t j, double* k) const {
        if (!std::isfinite(ws_.kprof[j]) || !(ws_.v[j] > 0.0)) {
            if (sign_ < 0)
                throw CausalityError("dual graph is not spacelike at node " + std::to_string(j), static_cast<int>(j));
            throw DomainError("non-finite geometry at node " + std::to_string(j));
        }
        k[0] = ws_.kprof[j];
        for (int i = 1; i < n_; ++i) k[i] = ws_.kang[j];
        for (int i = 0; i < n_; ++i)
            if (!(k[i] > 0.0))
                throw ConvexityError("principal curvature " + std::to_string(k[i]) + " <= 0 at node " +
                                         std::to_string(j),
                                     static_cast<int>(j));
    }

    detail::GeometryWorkspace ws_;
    const CurvatureFunction& F_;
    double sign_;
    int n_;
};

struct Rk4 {
    std::vector<double> k1, k2, k3, k4, tmp;

    explicit Rk4(std::size_t m) : k1(m), k2(m), k3(m), k4(m), tmp(m) {}

    void advance(Operator& op, std::vector<double>& u, double dt) {
        const auto& K = simd::active_kernels();
        const std::size_t m = u.size();
        op.rhs(u, k1);
        tmp = u;
        K.axpy(0.5 * dt, k1.data(), tmp.data(), m);
        op.rhs(tmp, k2);
        tmp = u;
        K.axpy(0.5 * dt, k2.data(), tmp.data(), m);
        op.rhs(tmp, k3);
        tmp = u;
        K.axpy(dt, k3.data(), tmp.data(), m);
        op.rhs(tmp, k4);
        K.rk4_combine(u.data(), k1.data(), k2.data(), k3.data(), k4.data(), dt, tmp.data(), m);
        u.swap(tmp);
    }
};

struct LoopResult {
    FlowStatus status = FlowStatus::Completed;
    std::string message;
    int node = -1;
};

// Shared driver; `record(t, u, dt_last, steps)` is called for every kept state.
template <class Record>
LoopResult integrate(Operator& op, std::vector<double> u, const FlowConfig& cfg, bool primal, Record&& record) {
    LoopResult res;
    double t = 0.0, dt_last = 0.0;
    long steps = 0, last_recorded = 0;
    std::vector<double> targets = cfg.record_times;
    std::sort(targets.begin(), targets.end());
    std::size_t next = 0;
    while (next < targets.size() && targets[next] <= 0.0) ++next;
    Rk4 rk(u.size());
    record(t, u, dt_last, steps);

    auto finished = [&]() -> bool {
        double size = 0.0;
        for (double x : u) size = std::max(size, std::abs(x));
        if (size < cfg.u_stop) {
            res.status = FlowStatus::Completed;
            return true;
        }
        if (cfg.t_end && t >= *cfg.t_end) {
            res.status = FlowStatus::ReachedTime;
            return true;
        }
        if (!primal && !cfg.t_end && !targets.empty() && next >= targets.size()) {
            res.status = FlowStatus::ReachedTime;
            return true;
        }
        return false;
    };

    try {
        while (!finished()) {
            if (steps >= cfg.max_steps) throw StiffnessError("step budget exhausted");
            double dt = op.stable_dt(u, cfg.cfl);
            if (!(dt >= cfg.dt_min))
                throw StiffnessError("time step " + std::to_string(dt) + " fell below dt_min at t = " + std::to_string(t));
            double land = std::numeric_limits<double>::infinity();
            if (next < targets.size()) land = targets[next];
            if (cfg.t_end) land = std::min(land, *cfg.t_end);
            bool landing = false;
            if (t + dt >= land) {
                dt = land - t;
                landing = true;
            }
            rk.advance(op, u, dt);
            for (std::size_t j = 0; j < u.size(); ++j)
                if (!std::isfinite(u[j])) throw DomainError("non-finite value at node " + std::to_string(j));
            t = landing ? land : t + dt;
            dt_last = dt;
            ++steps;
            bool hit = false;
            while (next < targets.size() && targets[next] <= t) {
                hit = true;
                ++next;
            }
            if (hit || steps % cfg.record_every == 0) {
                record(t, u, dt_last, steps);
                last_recorded = steps;
            }
        }
    } catch (const ConvexityError& e) {
        res = {FlowStatus::ConvexityLost, e.what(), e.node()};
    } catch (const CausalityError& e) {
        res = {FlowStatus::CausalityLost, e.what(), e.node()};
    } catch (const StiffnessError& e) {
        res = {FlowStatus::Stiff, e.what(), -1};
    } catch (const DomainError& e) {
        res = {FlowStatus::DomainFailure, e.what(), -1};
    }
    if (steps > last_recorded) {
        try {
            record(t, u, dt_last, steps);
        } catch (const std::exception&) {
            // The failing state itself may not admit a geometry; keep what was recorded.
        }
    }
    return res;
}

}  // namespace

void FlowConfig::validate() const {
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConstructionError("cfl must lie in (0, 0.5]");
    if (!(u_stop > 0.0)) throw ConstructionError("u_stop must be positive");
    if (!(dt_min > 0.0)) throw ConstructionError("dt_min must be positive");
    if (record_every < 1) throw ConstructionError("record_every must be >= 1");
    if (m < 16) throw ConstructionError("m must be >= 16");
    if (F.n < 1 || F.n > kMaxDimension) throw ConstructionError("n out of range");
}

const char* to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::Completed: return "completed";
        case FlowStatus::ReachedTime: return "reached_time";
        case FlowStatus::Stiff: return "stiffness";
        case FlowStatus::ConvexityLost: return "convexity_lost";
        case FlowStatus::CausalityLost: return "causality_lost";
        case FlowStatus::DomainFailure: return "domain_failure";
    }
    return "?";
}

ScalarField scalar_rhs(const HyperbolicGraph& g, const CurvatureFunction& F) {
    Operator op(g.grid(), F, +1.0);
    std::vector<double> out(g.u.size());
    op.rhs(g.u.values, out);
    return ScalarField(g.grid(), std::move(out), g.grid().even_parity());
}

ScalarField dual_rhs(const DeSitterGraph& d, const CurvatureFunction& F_tilde) {
    Operator op(d.grid(), F_tilde, -1.0);
    std::vector<double> out(d.u_star.size());
    op.rhs(d.u_star.values, out);
    return ScalarField(d.grid(), std::move(out), d.grid().even_parity());
}

FlowState step(const FlowState& state, const CurvatureFunction& F, double cfl, double dt_min, double dt_cap) {
    Operator op(state.u.grid, F, +1.0);
    double dt = op.stable_dt(state.u.values, cfl);
    if (!(dt >= dt_min)) throw StiffnessError("time step " + std::to_string(dt) + " fell below dt_min");
    dt = std::min(dt, dt_cap);
    std::vector<double> u = state.u.values;
    Rk4 rk(u.size());
    rk.advance(op, u, dt);
    FlowState next;
    next.t = state.t + dt;
    next.u = ScalarField(state.u.grid, std::move(u), state.u.parity);
    next.geometry = geometry_of(HyperbolicGraph(next.u), &F);
    next.dt_last = dt;
    next.steps = state.steps + 1;
    return next;
}

FlowTrajectory run_flow(const FlowConfig& config) {
    config.validate();
    return run_flow(config, initial_graph(config.initial, config.grid()));
}

FlowTrajectory run_flow(const FlowConfig& config, const HyperbolicGraph& initial) {
    config.validate();
    const CurvatureFunction F(config.F);
    FlowTrajectory traj;
    traj.config = config;
    const auto geo0 = geometry_of(initial);
    traj.initially_horoconvex = geo0.horoconvex;
    if (!geo0.strictly_convex) {
        traj.status = FlowStatus::ConvexityLost;
        traj.failure_node = geo0.first_nonconvex;
        traj.message = "initial datum is not strictly convex at node " + std::to_string(geo0.first_nonconvex);
        FlowState s0;
        s0.u = initial.u;
        s0.geometry = geo0;
        traj.states.push_back(std::move(s0));
        return traj;
    }
    const Grid& g = initial.grid();
    Operator op(g, F, +1.0);
    auto res = integrate(op, initial.u.values, config, true,
                         [&](double t, const std::vector<double>& u, double dt_last, long steps) {
                             FlowState s;
                             s.t = t;
                             s.u = ScalarField(g, u, g.even_parity());
                             s.geometry = geometry_of(HyperbolicGraph(s.u), &F);
                             s.dt_last = dt_last;
                             s.steps = steps;
                             traj.states.push_back(std::move(s));
                         });
    traj.status = res.status;
    traj.message = res.message;
    traj.failure_node = res.node;
    traj.T_star_estimate = estimate_Tstar(traj);
    return traj;
}

DualTrajectory run_dual_flow(const FlowConfig& config, const DeSitterGraph& initial) {
    config.validate();
    const CurvatureFunction Ft(config.F);
    DualTrajectory traj;
    const Grid& g = initial.grid();
    Operator op(g, Ft, -1.0);
    auto res = integrate(op, initial.u_star.values, config, false,
                         [&](double t, const std::vector<double>& u, double dt_last, long steps) {
                             DualState s;
                             s.t = t;
                             s.u_star = ScalarField(g, u, g.even_parity());
                             s.geometry = desitter_geometry(DeSitterGraph(s.u_star), &Ft);
                             s.dt_last = dt_last;
                             s.steps = steps;
                             traj.states.push_back(std::move(s));
                         });
    traj.status = res.status;
    traj.message = res.message;
    traj.failure_node = res.node;
    return traj;
}

double spherical_Tstar(double r0) {
    if (!(r0 > 0.0)) throw DomainError("spherical radius must be positive");
    return std::log(std::cosh(r0));
}

double spherical_theta(double t, double r0) {
    const double T = spherical_Tstar(r0);
    if (!(t >= 0.0 && t < T)) throw DomainError("t must lie in [0, T*) for the spherical solution");
    return std::acosh(std::cosh(r0) * std::exp(-t));
}

double barrier_theta(double t, double T_star) {
    if (!(t < T_star)) throw DomainError("t must be below the extinction time");
    return std::acosh(std::exp(T_star - t));
}

TstarEstimate estimate_Tstar(const FlowTrajectory& traj) {
    TstarEstimate est;
    if (traj.states.empty()) {
        est.warning = true;
        return est;
    }
    const Grid& g = traj.states.front().u.grid;
    const auto w = quadrature_weights(g);
    const double area = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> T;
    std::vector<double> all;
    for (const auto& s : traj.states) {
        const double mean = integrate_sphere(s.u) / area;
        const double v = s.t + std::log(std::cosh(mean));
        all.push_back(v);
        if (s.u.max() < 0.1) T.push_back(v);
    }
    if (T.size() < 3) {
        est.warning = true;
        T = all;
    }
    const std::size_t k = T.size();
    const std::size_t window = std::min<std::size_t>(5, k);
    const auto [lo, hi] = std::minmax_element(T.end() - static_cast<std::ptrdiff_t>(window), T.end());
    est.spread = *hi - *lo;
    if (est.spread > 1e-3) est.warning = true;
    est.value = T.back();
    if (k >= 3) {
        const double d1 = T[k - 2] - T[k - 3], d2 = T[k - 1] - T[k - 2];
        const double den = d2 - d1;
        if (std::abs(den) > 1e-13) {
            const double corr = d2 * d2 / den;
            if (std::abs(corr) <= 10.0 * std::abs(d2)) est.value = T[k - 1] - corr;
        }
    }
    return est;
}

std::vector<RescaledRecord> rescale(const FlowTrajectory& traj, double T_star, const DualTrajectory* dual) {
    std::vector<RescaledRecord> out;
    for (const auto& s : traj.states) {
        RescaledRecord r;
        r.t = s.t;
        r.Theta = barrier_theta(s.t, T_star);
        r.tau = -std::log(r.Theta);
        const auto m = s.u.size();
        r.u_tilde.resize(m);
        r.kappa_scaled.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            r.u_tilde[j] = s.u.values[j] / r.Theta;
            r.kappa_scaled[j] = s.geometry.min_kappa(static_cast<int>(j)) * r.Theta;
        }
        const ScalarField ut(s.u.grid, r.u_tilde, s.u.parity);
        for (int k = 0; k < 3; ++k) {
            const auto d = k == 0 ? ut : differentiate(ut, k);
            for (double x : d.values) r.ck_norm[static_cast<std::size_t>(k)] = std::max(r.ck_norm[static_cast<std::size_t>(k)], std::abs(x));
        }
        r.F_scaled.resize(s.geometry.F.size());
        for (std::size_t j = 0; j < s.geometry.F.size(); ++j) r.F_scaled[j] = s.geometry.F[j] * r.Theta;
        if (dual) {
            for (const auto& d : dual->states)
                if (std::abs(d.t - s.t) <= 1e-14 * std::max(1.0, s.t)) {
                    r.w.resize(m);
                    for (std::size_t j = 0; j < m; ++j) r.w[j] = d.u_star.values[j] / r.Theta;
                    break;
                }
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace dualflow
