#pragma once

#include <string>
#include <vector>

#include "landau/config.hpp"
#include "landau/verification.hpp"

namespace landau {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitContinuationAbort = 3;
inline constexpr int kExitInstability = 4;

/// Run a simulation and write snap_*.lndf, diagnostics.csv and summary.json
/// into the config's output directory.
int cmd_run(const RunConfig& config);

/// Recompute diagnostics rows for stored snapshots; writes diagnostics.csv.
int cmd_diagnose(const RunConfig& config, const std::vector<std::string>& snapshot_paths);

/// Run a verification suite ("kernel", "solver", "estimates" or "all");
/// aggregates per-check JSON into verify.json and prints it.
int cmd_verify(const RunConfig& config, const std::string& suite);

/// Contraction comparison of two stored runs; writes contraction.json.
int cmd_compare(const std::string& dir_a, const std::string& dir_b, const RunConfig& config);

/// The fixed diagnostics.csv header and row serialization.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRow& row);

/// Load every snap_*.lndf of a run directory into a trajectory (sorted by time).
TrajectoryRecord load_run_directory(const std::string& dir);

}  // namespace landau
