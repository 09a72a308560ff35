#pragma once

#include <string>

#include "hsde/config.hpp"

namespace hsde {

/// Executes the configured solver over all replications and writes one CSV
/// per replication plus summary.json into out_dir. Returns a process exit
/// status. Outputs are byte-identical for identical (config, seed).
int run_simulate(const RunConfig& config, const std::string& out_dir);

/// Runs the configured checks, writes hypothesis_report.txt and
/// checks.json, and prints one pass/fail line per check. Exit status is
/// nonzero iff a non-negative-control check fails.
int run_verify(const RunConfig& config, const std::string& out_dir);

}  // namespace hsde
