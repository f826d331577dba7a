#pragma once

#include "dualflow/config.hpp"
#include "dualflow/outputs.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dualflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvariant = 2;
inline constexpr int kExitNumerical = 3;

/// Tolerance factor for preserved inequalities: violations up to kGridTolerance h^2 are
/// attributed to discretization.
inline constexpr double kGridTolerance = 1.0;

/// Allowed slack in inf u <= Theta(t, T*) <= sup u.
inline constexpr double kBarrierSlack = 1e-4;

struct ExecuteResult {
    int exit_code = kExitOk;
    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
    RunSummary summary;
    std::vector<std::string> violations;
    std::optional<FailureRecord> failure;
};

/// Runs the manifest without touching the file system.
ExecuteResult run_manifest(const RunManifest& manifest);

/// Runs the manifest and writes its outputs (and failure.json on failure) to manifest.out.
int execute(const RunManifest& manifest);

/// Executes every *.cfg / *.toml file in dir on a worker pool capped by DUALFLOW_THREADS.
/// Relative output paths resolve against dir; the default "out" becomes "<stem>.out".
/// Returns the largest exit code.
int sweep(const std::string& dir, std::ostream& log);

}  // namespace dualflow
