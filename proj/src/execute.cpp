#include "dualflow/execute.hpp"

#include "dualflow/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace dualflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* failure_kind(FlowStatus s) {
    switch (s) {
        case FlowStatus::ConvexityLost: return "ConvexityError";
        case FlowStatus::CausalityLost: return "CausalityError";
        case FlowStatus::Stiff: return "StiffnessError";
        case FlowStatus::DomainFailure: return "DomainError";
        default: return "none";
    }
}

FamilySpec inverse_family(const FamilySpec& f) {
    if (f.kind == FamilySpec::Kind::InverseOf) return *f.inner;
    return FamilySpec::inverse_of(f);
}

double theta_or_nan(double t, double T_star) { return t < T_star ? barrier_theta(t, T_star) : kNaN; }

double osc(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

// Records, snapshots and invariant checks shared by the primal, both and dual modes.
void assemble(ExecuteResult& res, const RunManifest& man, const FlowTrajectory& traj, const DualTrajectory* dual,
              std::vector<std::pair<double, double>>* plot) {
    const CurvatureFunction F(man.config.F);
    const double T_star = traj.T_star_estimate.value;
    const double eps = traj.states.empty() ? 0.0 : pinching_epsilon(traj.states.front().geometry);
    auto dual_at = [&](double t) -> const DualState* {
        if (!dual) return nullptr;
        for (const auto& d : dual->states)
            if (std::abs(d.t - t) <= 1e-14 * std::max(1.0, t)) return &d;
        return nullptr;
    };
    for (const auto& s : traj.states) {
        const double Theta = theta_or_nan(s.t, T_star);
        const double tau = -std::log(Theta);
        const DualState* d = dual_at(s.t);
        std::optional<DeSitterGraph> dg;
        if (d) dg.emplace(d->u_star);
        auto rec = compute_record(s, F, dg ? &*dg : nullptr, Theta, tau, eps, man.sigma);
        res.records.push_back(rec);
        Snapshot snap;
        snap.t = s.t;
        snap.u = s.u.values;
        if (d) snap.u_star = d->u_star.values;
        snap.f_sigma_int_p2 = rec.f_sigma_int_p2;
        snap.f_sigma_int_p8 = rec.f_sigma_int_p8;
        res.snapshots.push_back(std::move(snap));
        if (plot && std::isfinite(Theta)) plot->emplace_back(tau, osc(s.u.values) / Theta);
    }

    res.summary.F = family_name(man.config.F.family);
    res.summary.status = to_string(traj.status);
    res.summary.message = traj.message;
    res.summary.T_star_estimate = T_star;
    res.summary.T_star_spread = traj.T_star_estimate.spread;
    res.summary.T_star_warning = traj.T_star_estimate.warning;
    res.summary.assumption_clause = traj.initially_horoconvex ? 1 : 2;
    if (!traj.states.empty()) res.summary.extinction_offset = res.records.back().center_offset;

    if (!traj.ok()) return;
    const double h = man.config.grid().h;
    const double tol = kGridTolerance * h * h;
    const auto& first = res.records.front();
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        const std::string at = " at t = " + format17(r.t);
        if (!(r.pinch_ratio > 0.0)) res.violations.push_back("pinch ratio not positive" + at);
        if (std::isfinite(r.tau)) {
            const double Theta = std::exp(-r.tau);
            if (Theta < r.u_min - kBarrierSlack || Theta > r.u_max + kBarrierSlack)
                res.violations.push_back("spherical barrier violated" + at);
        }
        if (traj.initially_horoconvex) {
            if (r.horoconvex_margin < -tol) res.violations.push_back("horoconvexity lost" + at);
            if (r.pinching_T < first.pinching_T - tol) res.violations.push_back("pinching tensor decreased" + at);
        }
        if (i > 0) {
            const auto& a = traj.states[i - 1].u.values;
            const auto& b = traj.states[i].u.values;
            for (std::size_t j = 0; j < a.size(); ++j)
                if (!(b[j] < a[j])) {
                    res.violations.push_back("radial function not decreasing at node " + std::to_string(j) + at);
                    break;
                }
        }
    }
}

void fail_numerical(ExecuteResult& res, const std::string& kind, const std::string& status, const std::string& msg,
                    int node, double t) {
    res.exit_code = kExitNumerical;
    res.failure = FailureRecord{kind, status, msg, node, t, {}};
}

void finish(ExecuteResult& res) {
    if (res.exit_code != kExitOk) return;
    if (!res.violations.empty()) {
        res.exit_code = kExitInvariant;
        res.failure = FailureRecord{"InvariantViolation", "invariant_violation", res.violations.front(), -1, 0.0,
                                    res.violations};
    }
}

ExecuteResult run_primal(const RunManifest& man, bool with_dual, std::vector<std::pair<double, double>>& plot) {
    ExecuteResult res;
    const auto& cfg = man.config;
    const auto initial = initial_graph(cfg.initial, cfg.grid());
    const auto geo0 = geometry_of(initial);
    std::optional<DualPair> pair;
    if (with_dual && geo0.strictly_convex) {
        try {
            pair = gauss_dual(initial);
        } catch (const std::exception& e) {
            fail_numerical(res, "DualityBroken", "duality_broken", e.what(), -1, 0.0);
            return res;
        }
    }
    const auto traj = run_flow(cfg, initial);
    std::optional<DualTrajectory> dual;
    if (pair && traj.ok()) {
        FlowConfig dc = cfg;
        dc.F.family = inverse_family(cfg.F.family);
        dc.t_end.reset();
        dc.record_times.clear();
        for (const auto& s : traj.states)
            if (s.t > 0.0) dc.record_times.push_back(s.t);
        dc.u_stop = std::numeric_limits<double>::min();  // stop at the last matched time
        dual = run_dual_flow(dc, pair->dual);
    }
    assemble(res, man, traj, dual ? &*dual : nullptr, &plot);
    if (!traj.ok()) {
        fail_numerical(res, failure_kind(traj.status), to_string(traj.status), traj.message, traj.failure_node,
                       traj.states.empty() ? 0.0 : traj.states.back().t);
    } else if (dual && !dual->ok()) {
        fail_numerical(res, failure_kind(dual->status), to_string(dual->status), "dual flow: " + dual->message,
                       dual->failure_node, dual->states.empty() ? 0.0 : dual->states.back().t);
    }
    finish(res);
    return res;
}

ExecuteResult run_dual_only(const RunManifest& man, std::vector<std::pair<double, double>>& plot) {
    ExecuteResult res;
    const auto& cfg = man.config;
    const CurvatureFunction F(cfg.F);
    const auto initial = initial_graph(cfg.initial, cfg.grid());
    DualPair pair;
    try {
        pair = gauss_dual(initial);
    } catch (const std::exception& e) {
        fail_numerical(res, "DualityBroken", "duality_broken", e.what(), -1, 0.0);
        return res;
    }
    FlowConfig dc = cfg;
    dc.F.family = inverse_family(cfg.F.family);
    const auto dual = run_dual_flow(dc, pair.dual);

    // Polar hypersurfaces of the dual states, treated as a primal trajectory.
    FlowTrajectory traj;
    traj.config = cfg;
    traj.status = dual.status;
    traj.message = dual.message;
    traj.failure_node = dual.failure_node;
    try {
        for (const auto& d : dual.states) {
            FlowState s;
            s.t = d.t;
            s.u = inverse_dual(DeSitterGraph(d.u_star)).u;
            s.geometry = geometry_of(HyperbolicGraph(s.u), &F);
            s.steps = d.steps;
            s.dt_last = d.dt_last;
            traj.states.push_back(std::move(s));
        }
    } catch (const std::exception& e) {
        traj.status = FlowStatus::DomainFailure;
        traj.message = std::string("polar of dual state: ") + e.what();
    }
    traj.initially_horoconvex = !traj.states.empty() && traj.states.front().geometry.horoconvex;
    traj.T_star_estimate = estimate_Tstar(traj);
    assemble(res, man, traj, &dual, &plot);
    if (!traj.ok())
        fail_numerical(res, failure_kind(traj.status), to_string(traj.status), traj.message, traj.failure_node,
                       traj.states.empty() ? 0.0 : traj.states.back().t);
    finish(res);
    return res;
}

ExecuteResult run_verify(const RunManifest& man) {
    ExecuteResult res;
    const auto& cfg = man.config;
    const CurvatureFunction F(cfg.F);
    const int n = cfg.F.n;
    auto fail = [&](const std::string& what) { res.violations.push_back(what); };

    // Curvature function battery at reproducible random points.
    {
        std::mt19937_64 rng(man.seed);
        std::uniform_real_distribution<double> dist(0.5, 5.0);
        const auto Ft = invert(F);
        const auto Ftt = invert(Ft);
        std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
        if (std::abs(F.value(ones) - 1.0) > 1e-12) fail("normalization F(1,...,1) != 1");
        std::vector<double> k(static_cast<std::size_t>(n));
        for (int s = 0; s < 100; ++s) {
            for (double& x : k) x = dist(rng);
            const auto ev = F.evaluate(k, 1);
            double euler = 0.0;
            for (int i = 0; i < n; ++i) {
                euler += ev.gradient[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)];
                if (!(ev.gradient[static_cast<std::size_t>(i)] > 0.0)) fail("F not monotone at a sample");
            }
            if (std::abs(euler - ev.value) > 1e-10 * ev.value) fail("Euler relation fails at a sample");
            if (std::abs(Ftt.value(k) - ev.value) > 1e-10 * ev.value) fail("inverse is not an involution at a sample");
        }
    }

    const auto initial = initial_graph(cfg.initial, cfg.grid());
    const auto geo0 = geometry_of(initial, &F);
    if (!geo0.strictly_convex) {
        fail_numerical(res, "ConvexityError", "convexity_lost", "initial datum is not strictly convex",
                       geo0.first_nonconvex, 0.0);
        return res;
    }
    for (int j = 0; j < cfg.grid().m; ++j) {
        const auto e = embed(initial, j);
        const auto& X = e.position.coords;
        const auto& nu = e.normal.coords;
        if (std::abs(minkowski_dot(X, X) + 1.0) > 1e-10 || std::abs(minkowski_dot(nu, nu) - 1.0) > 1e-10 ||
            std::abs(minkowski_dot(nu, X)) > 1e-10) {
            fail("embedding constraints fail at node " + std::to_string(j));
            break;
        }
    }

    double err = kNaN;
    try {
        auto worst = [](const DualityReport& r) {
            return std::max({r.max_kappa_product_error, r.max_h_mismatch, r.relation_u_ustar_error});
        };
        const auto r1 = verify_duality(gauss_dual(initial));
        RunManifest fine = man;
        fine.config.m *= 2;
        const auto r2 = verify_duality(gauss_dual(initial_graph(cfg.initial, fine.config.grid())));
        err = worst(r1);
        const double e2 = worst(r2);
        if (!(err <= 1e-10 || err / e2 >= 8.0))
            fail("duality errors do not converge: " + format17(err) + " at m, " + format17(e2) + " at 2m");
        if (!(r1.max_gradient_sq < 1.0)) fail("dual graph is not spacelike");
    } catch (const std::exception& e) {
        fail_numerical(res, "DualityBroken", "duality_broken", e.what(), -1, 0.0);
        return res;
    }

    FlowState s0;
    s0.u = initial.u;
    s0.geometry = geo0;
    auto rec = compute_record(s0, F, nullptr, kNaN, kNaN, pinching_epsilon(geo0), man.sigma);
    rec.duality_err = err;
    res.records.push_back(rec);
    Snapshot snap;
    snap.u = initial.u.values;
    snap.f_sigma_int_p2 = rec.f_sigma_int_p2;
    snap.f_sigma_int_p8 = rec.f_sigma_int_p8;
    try {
        snap.u_star = gauss_dual(initial).dual.u_star.values;
    } catch (const std::exception&) {
    }
    res.snapshots.push_back(std::move(snap));
    res.summary.F = family_name(cfg.F.family);
    res.summary.status = "verified";
    res.summary.T_star_estimate = kNaN;
    res.summary.assumption_clause = geo0.horoconvex ? 1 : 2;
    finish(res);
    return res;
}

}  // namespace

ExecuteResult run_manifest(const RunManifest& manifest) {
    std::vector<std::pair<double, double>> plot;
    switch (manifest.mode) {
        case RunMode::Primal: return run_primal(manifest, false, plot);
        case RunMode::Both: return run_primal(manifest, true, plot);
        case RunMode::Dual: return run_dual_only(manifest, plot);
        case RunMode::Verify: return run_verify(manifest);
    }
    return {};
}

int execute(const RunManifest& manifest) {
    std::vector<std::pair<double, double>> plot;
    ExecuteResult res;
    switch (manifest.mode) {
        case RunMode::Primal: res = run_primal(manifest, false, plot); break;
        case RunMode::Both: res = run_primal(manifest, true, plot); break;
        case RunMode::Dual: res = run_dual_only(manifest, plot); break;
        case RunMode::Verify: res = run_verify(manifest); break;
    }
    const OutputPaths paths{manifest.out};
    write_outputs(paths, manifest.config.grid(), res.summary, res.snapshots, res.records, plot);
    if (res.failure) {
        write_failure(paths, *res.failure);
    } else {
        std::error_code ec;
        std::filesystem::remove(paths.failure(), ec);
    }
    return res.exit_code;
}

int sweep(const std::string& dir, std::ostream& log) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".cfg" || ext == ".toml")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DUALFLOW_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) threads = std::min<unsigned>(threads, static_cast<unsigned>(v));
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(files.size(), 1)));

    std::vector<int> codes(files.size(), kExitOk);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            int code = kExitOk;
            std::string note;
            try {
                auto man = load_config(files[i].string());
                if (man.out == "out") man.out = files[i].stem().string() + ".out";
                if (fs::path(man.out).is_relative()) man.out = (files[i].parent_path() / man.out).string();
                code = execute(man);
            } catch (const std::exception& e) {
                code = kExitUsage;
                note = e.what();
            }
            codes[i] = code;
            std::lock_guard<std::mutex> lock(log_mutex);
            log << files[i].filename().string() << " exit " << code << (note.empty() ? "" : " " + note) << "\n";
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return codes.empty() ? kExitOk : *std::max_element(codes.begin(), codes.end());
}

}  // namespace dualflow
