#pragma once

#include <exception>
#include <string>

#include "pcap/config.hpp"
#include "pcap/solver.hpp"

namespace pcap {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // unexpected error (solver breakdown, out-of-range level)
  kExitConfig = 2,
  kExitArtifact = 3,
  kExitCheck = 4,
};

/// Maps an exception to the exit-code contract.
int exit_code_for(const std::exception& e);

/// Worker cap from PCAP_THREADS (default: hardware concurrency, at least 1).
int worker_count();

/// Loads cfg.field or solves the configured problem.
Field acquire_field(const RunConfig& cfg);
/// Same body, params, r_far and grading with twice the mesh spacing.
Field companion_field(const Field& field);

// Each command writes its artifacts into cfg.out and a manifest.json last,
// prints a short summary to stdout and returns an ExitCode.
int cmd_solve(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_check(const RunConfig& cfg);
int cmd_identities(const RunConfig& cfg);
int cmd_capacity(const RunConfig& cfg);

/// Version string recorded in manifests.
std::string tool_version();

}  // namespace pcap
