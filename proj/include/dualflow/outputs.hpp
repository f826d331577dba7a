#pragma once

#include "dualflow/diagnostics.hpp"

#include <string>
#include <vector>

namespace dualflow {

inline constexpr const char* kCsvHeader =
    "t,tau,u_min,u_max,pinch_ratio,horoconvex_margin,pinching_T,osc_F_tilde,f_sigma_max,A2_minus_nF2_max,"
    "rho_minus,rho_plus,duality_err,w_min,w_max";

struct OutputPaths {
    std::string dir;
    std::string csv() const { return dir + "/diagnostics.csv"; }
    std::string snapshots() const { return dir + "/snapshots.json"; }
    std::string plot() const { return dir + "/plot.dat"; }
    std::string failure() const { return dir + "/failure.json"; }
};

/// One snapshot per record: time, u and (when present) u*.
struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> u_star;
    double f_sigma_int_p2 = 0.0;
    double f_sigma_int_p8 = 0.0;
};

struct RunSummary {
    std::string F;
    std::string status = "completed";
    std::string message;
    double T_star_estimate = 0.0;
    double T_star_spread = 0.0;
    bool T_star_warning = false;
    double extinction_offset = 0.0;
    int assumption_clause = 2;
};

/// Formats a double with 17 significant digits ("nan" for NaN).
std::string format17(double x);

std::string csv_row(const DiagnosticsRecord& r);

/// Writes diagnostics.csv, snapshots.json and plot.dat (tau, osc u~). Creates the directory.
/// Throws std::runtime_error with the path on I/O failure.
void write_outputs(const OutputPaths& paths, const Grid& grid, const RunSummary& summary,
                   const std::vector<Snapshot>& snapshots, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::pair<double, double>>& plot);

struct FailureRecord {
    std::string kind;       // e.g. ConvexityError
    std::string status;
    std::string message;
    int node = -1;
    double t = 0.0;
    std::vector<std::string> violations;
};

void write_failure(const OutputPaths& paths, const FailureRecord& f);

struct LoadedSnapshots {
    Grid grid;
    RunSummary summary;
    std::vector<Snapshot> snapshots;
};

LoadedSnapshots load_snapshots(const std::string& path);

}  // namespace dualflow
