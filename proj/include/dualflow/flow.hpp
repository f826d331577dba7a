#pragma once

// Contracting flow x' = -F nu of graphs in H^{n+1}, written as du/dt = -F v, and the
// dual expanding flow in de Sitter space, du*/dt = v~ / F~(kappa~), both integrated with
// classical RK4 under a parabolic step restriction.

#include "dualflow/dualmap.hpp"
#include "dualflow/hgeom.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dualflow {

struct FlowConfig {
    CurvatureFunctionSpec F;          // F.n is the hypersurface dimension
    int m = 128;
    double cfl = 0.2;
    double u_stop = 0.02;
    double dt_min = 1e-12;
    int record_every = 100;
    InitialSpec initial;
    std::optional<double> t_end;
    std::vector<double> record_times;  // steps are shortened to land on these exactly
    long max_steps = 50'000'000;

    int n() const noexcept { return F.n; }
    Grid grid() const { return Grid::for_dimension(F.n, m); }
    /// Throws ConstructionError on out-of-range values.
    void validate() const;
};

struct FlowState {
    double t = 0.0;
    ScalarField u;
    GraphGeometry geometry;
    double dt_last = 0.0;
    long steps = 0;
};

enum class FlowStatus { Completed, ReachedTime, Stiff, ConvexityLost, CausalityLost, DomainFailure };

const char* to_string(FlowStatus s);

struct TstarEstimate {
    double value = 0.0;
    double spread = 0.0;
    bool warning = false;
};

struct FlowTrajectory {
    std::vector<FlowState> states;
    FlowStatus status = FlowStatus::Completed;
    std::string message;
    int failure_node = -1;
    TstarEstimate T_star_estimate;
    FlowConfig config;
    bool initially_horoconvex = false;

    bool ok() const noexcept { return status == FlowStatus::Completed || status == FlowStatus::ReachedTime; }
};

/// -F v per node. Throws ConvexityError if a curvature leaves the positive cone.
ScalarField scalar_rhs(const HyperbolicGraph& g, const CurvatureFunction& F);

/// Dual right-hand side v~ / F~(kappa~). Throws CausalityError or ConvexityError.
ScalarField dual_rhs(const DeSitterGraph& d, const CurvatureFunction& F_tilde);

/// One RK4 step with dt = min(cfl (h sinh u_min)^2 / max sum F_i, dt_cap).
/// Throws StiffnessError below dt_min and ConvexityError on loss of convexity.
FlowState step(const FlowState& state, const CurvatureFunction& F, double cfl, double dt_min = 1e-12,
               double dt_cap = 1e300);

/// Steps from the configured initial datum until u_max < u_stop (or t_end). Failures stop the
/// run and are reported in the status, with the states recorded so far.
FlowTrajectory run_flow(const FlowConfig& config);
FlowTrajectory run_flow(const FlowConfig& config, const HyperbolicGraph& initial);

double spherical_Tstar(double r0);

/// arccosh(cosh r0 e^{-t}); throws DomainError for t outside [0, T*).
double spherical_theta(double t, double r0);

/// arccosh e^{T* - t}, the spherical barrier with extinction time T*.
double barrier_theta(double t, double T_star);

/// Aitken-accelerated limit of t + ln cosh(mean u) over the last records.
TstarEstimate estimate_Tstar(const FlowTrajectory& traj);

struct DualState {
    double t = 0.0;
    ScalarField u_star;
    GraphGeometry geometry;
    double dt_last = 0.0;
    long steps = 0;
};

struct DualTrajectory {
    std::vector<DualState> states;
    FlowStatus status = FlowStatus::Completed;
    std::string message;
    int failure_node = -1;

    bool ok() const noexcept { return status == FlowStatus::Completed || status == FlowStatus::ReachedTime; }
};

/// Integrates the dual flow; config.F is the spec of F~. Stops when max |u*| < u_stop, at t_end,
/// or after the last record time.
DualTrajectory run_dual_flow(const FlowConfig& config, const DeSitterGraph& initial);

struct RescaledRecord {
    double t = 0.0;
    double Theta = 0.0;
    double tau = 0.0;
    std::vector<double> u_tilde;
    std::vector<double> F_scaled;       // F Theta
    std::vector<double> kappa_scaled;   // min kappa Theta per node
    std::vector<double> w;              // u* / Theta; empty without a dual
    std::array<double, 3> ck_norm{};    // max |d^k u~ / dtheta^k|, k = 0, 1, 2
};

/// Rescales each record by the spherical barrier with extinction time T_star. A dual trajectory
/// with states at the same times supplies w.
std::vector<RescaledRecord> rescale(const FlowTrajectory& traj, double T_star, const DualTrajectory* dual = nullptr);

}  // namespace dualflow
