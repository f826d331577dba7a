#pragma once

// Monitored invariants of a flow state and exponential-rate fits.

#include "dualflow/flow.hpp"

#include <span>
#include <vector>

namespace dualflow {

struct DiagnosticsRecord {
    double t = 0.0;
    double tau = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double pinch_ratio = 1.0;         // min over nodes of kappa_min / kappa_max
    double horoconvex_margin = 0.0;   // min over nodes of kappa_min - 1
    double pinching_T = 0.0;          // min over nodes of kappa_1 - 1 - eps (H - n)
    double osc_F_tilde = 0.0;         // osc(F Theta)
    double f_sigma_max = 0.0;         // max F^-(2 - sigma) (|A|^2 - n F^2)
    double A2_minus_nF2_max = 0.0;
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double duality_err = 0.0;         // NaN without a dual
    double w_min = 0.0;               // NaN without a dual
    double w_max = 0.0;
    // Not part of the CSV.
    double f_sigma_int_p2 = 0.0;
    double f_sigma_int_p8 = 0.0;
    double F_tilde_dev = 0.0;         // max |F Theta - 1|
    double center_offset = 0.0;
    bool radii_fallback = false;
};

/// Half the largest eps with kappa_1 - 1 >= eps (H - n) at every node; 0 if not horoconvex.
double pinching_epsilon(const GraphGeometry& geo);

/// Every field of the record. `dual`, if given, is the dual flow state at the same time.
DiagnosticsRecord compute_record(const FlowState& state, const CurvatureFunction& F, const DeSitterGraph* dual,
                                 double Theta, double tau, double epsilon, double sigma);

struct RateFit {
    double C = 0.0;
    double delta = 0.0;      // y ~ C exp(-delta tau)
    double residual = 0.0;   // RMS of the log-linear fit
    double log_range = 0.0;  // max log y - min log y
    bool clipped = false;    // some y <= 0 was raised to the floor
};

/// Least squares for log y = log C - delta tau. Needs at least 5 samples.
RateFit fit_exponential(std::span<const double> taus, std::span<const double> ys);

struct DecayReport {
    bool holds = false;
    double c0 = 0.0;
    double delta = 0.0;
    double worst_margin = 0.0;   // min over records and nodes of c0 F^(2-delta) - (|A|^2 - n F^2)
};

/// Checks |A|^2 - n F^2 <= c0 F^(2 - delta) at every node of every state.
DecayReport decay_check(const std::vector<FlowState>& states, double c0, double delta);

/// Fits delta from the trend of max (|A|^2 - n F^2) / F^2 against F, then the smallest c0, and
/// checks. holds is false if no positive delta is supported by the data.
DecayReport fit_decay(const std::vector<FlowState>& states);

/// (sum F_i) |A|^2 - F H divided by sum_{i<j} (kappa_i - kappa_j)^2; NaN on the diagonal.
double kn_ratio(const CurvatureFunction& F, std::span<const double> kappa);

/// Largest kn_ratio over a tensor grid on [lo, hi]^n.
double kn_constant_prescan(const CurvatureFunction& F, int per_axis, double lo, double hi);

}  // namespace dualflow
