#pragma once

#include <functional>
#include <string>

#include "sbmdyn/config.hpp"

namespace sbmdyn {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitNotFound = 4,
};

/// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception(std::string& message);

/// Output directory: $SBMDYN_OUTPUT_DIR when set, else cfg.output_dir.
std::string resolve_output_dir(const RunConfig& cfg);

using LogSink = std::function<void(int level, const std::string& line)>;

/// Each command writes its files into the output directory and returns the
/// path of the main artifact.
std::string cmd_ground(const RunConfig& cfg, const LogSink& log = {});
std::string cmd_evolve(const RunConfig& cfg, const LogSink& log = {});
std::string cmd_thermal(const RunConfig& cfg, const LogSink& log = {});
std::string cmd_scan(const RunConfig& cfg, const LogSink& log = {});
std::string cmd_analyze(const std::string& trajectory_path, const RunConfig& cfg, const LogSink& log = {});

/// Dispatches on cfg.kind.
std::string run_command(const RunConfig& cfg, const LogSink& log = {});

}  // namespace sbmdyn
