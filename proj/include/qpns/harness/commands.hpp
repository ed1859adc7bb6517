#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpns/harness/config.hpp"
#include "qpns/verify.hpp"

namespace qpns::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConvergence = 2,
  kExitConfig = 3,
  kExitInvariant = 4,
};

/// Exit status for the exception currently being handled.
int exit_code_for_current_exception(std::ostream& err);

/// Each command writes its artifacts under the output directory and records
/// them in manifest.json. Failures are reported by exception.
void cmd_solve_torus(const RunConfig& cfg, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& torus_path, std::ostream& log);
/// Returns the report; the caller maps failures to kExitInvariant.
VerifyReport cmd_verify(const RunConfig& cfg, std::optional<std::uint64_t> seed, std::ostream& log,
                        const LerayFn& leray = {});

/// Full command line (argv[0] included), returns the exit status. `leray`
/// replaces the projector under test in `verify`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const LerayFn& leray = {});

/// Lower-case hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace qpns::harness
