#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "qpns/stability.hpp"
#include "qpns/torus.hpp"

namespace qpns::harness {

/// Everything one CLI invocation needs. Built from a JSON file:
///
///   grid      {nu, d, Kphi, Kx}
///   frequency {omega: [..], Lcheck}
///   forcing   {epsilon, zero_space_mean, modes: [{l, j, comp, re, im}], file}
///   solver    {sigma, s, tol_residual, max_iter, contraction_probe, probe_pairs, probe_seed}
///   sim       {alpha, delta, dt, T, s, integrator, burn_in}
///   verify    {cases, horizon}
///   seed, output_dir
///
/// Forcing modes carry their conjugate implicitly. `file` names a snapshot with
/// further modes (same convention). Relative paths resolve against the config's
/// directory.
struct RunConfig {
  GridSpec grid;  // ncomp == d
  std::vector<double> omega;
  int Lcheck = 50;
  ForcingSpec forcing;
  SolverConfig solver;
  SimConfig sim;
  int verify_cases = 20;
  double verify_horizon = 6.0;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "qpns-out";
  nlohmann::json source;
};

/// Throws ConfigParse on malformed or invalid content.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
/// Throws IoError when the file cannot be read, ConfigParse otherwise.
RunConfig load_run_config(const std::filesystem::path& path);

/// QPNS_OUTPUT_DIR when set, else cfg.output_dir.
std::filesystem::path resolve_output_dir(const RunConfig& cfg);

}  // namespace qpns::harness
