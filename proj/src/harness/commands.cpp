#include "qpns/harness/commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qpns/random_fields.hpp"
#include "qpns/snapshot.hpp"
#include "qpns/spectral.hpp"

namespace qpns::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path prepare_output_dir(const RunConfig& cfg) {
  const fs::path dir = resolve_output_dir(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

/// Adds (or refreshes) entries for `names`, keeping those of earlier commands.
void update_manifest(const fs::path& dir, const std::vector<std::string>& names) {
  const fs::path path = dir / "manifest.json";
  json manifest = json::object();
  if (std::ifstream in(path); in) {
    try {
      manifest = json::parse(in);
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  if (!manifest.contains("artifacts") || !manifest["artifacts"].is_object()) manifest["artifacts"] = json::object();
  for (const auto& name : names) {
    const fs::path p = dir / name;
    manifest["artifacts"][name] = {{"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}};
  }
  write_json(path, manifest);
}

json grid_json(const GridSpec& g) {
  return {{"nu", g.nu}, {"d", g.d}, {"Kphi", g.Kphi}, {"Kx", g.Kx}};
}

json config_echo(const RunConfig& cfg) {
  json resolved = {
      {"grid", grid_json(cfg.grid)},
      {"omega", cfg.omega},
      {"Lcheck", cfg.Lcheck},
      {"epsilon", cfg.forcing.epsilon},
      {"zero_space_mean", cfg.forcing.zero_space_mean},
      {"solver",
       {{"sigma", cfg.solver.idx.sigma},
        {"s", cfg.solver.idx.s},
        {"tol_residual", cfg.solver.tol_residual},
        {"max_iter", cfg.solver.max_iter},
        {"contraction_probe", cfg.solver.contraction_probe},
        {"probe_pairs", cfg.solver.probe_pairs},
        {"probe_seed", cfg.solver.probe_seed}}},
      {"sim",
       {{"alpha", cfg.sim.alpha},
        {"delta", cfg.sim.delta},
        {"dt", cfg.sim.dt},
        {"T", cfg.sim.T},
        {"s", cfg.sim.s},
        {"integrator", to_string(cfg.sim.integrator)},
        {"burn_in", cfg.sim.burn_in}}},
      {"seed", cfg.seed},
  };
  return {{"source", cfg.source}, {"resolved", resolved}};
}

json frequency_json(const FrequencySpec& f) {
  return {{"omega", f.omega}, {"gamma", f.gamma}, {"gamma_est", f.gamma_est}, {"Lcheck", f.Lcheck},
          {"certified", f.certified}};
}

json torus_json(const TorusSolution& s) {
  json j = {
      {"iterations", s.iterations},
      {"converged", s.converged},
      {"residual_history", s.residual_history},
      {"pde_residual", s.pde_residual},
      {"momentum_residual", s.momentum_residual},
      {"fixed_point_defect", s.fixed_point_defect},
      {"norm_U", s.norm_U},
      {"norm_P", s.norm_P},
      {"c_star", s.c_star},
      {"gamma_est", s.gamma_est},
  };
  if (s.probe) {
    j["contraction_probe"] = {{"radius", s.probe->radius},
                              {"pairs", s.probe->pairs},
                              {"lipschitz_max", s.probe->lipschitz_max},
                              {"lipschitz_mean", s.probe->lipschitz_mean}};
  }
  return j;
}

json series_json(const DecaySeries& s) {
  return {
      {"samples", s.times.size()},
      {"alpha", s.alpha},
      {"alpha_fit", s.alpha_fit},
      {"fit_r2", s.fit_r2},
      {"fit_valid", s.fit_valid},
      {"q_alpha_fit", s.q_alpha_fit},
      {"q_fit_r2", s.q_fit_r2},
      {"q_fit_valid", s.q_fit_valid},
      {"weighted_sup", s.weighted_sup},
      {"orbital_constant", s.orbital_constant},
      {"max_divergence_defect", s.max_divergence_defect},
      {"max_mean_defect", s.max_mean_defect},
      {"blow_up", s.blow_up},
  };
}

std::string trajectory_tsv(const DecaySeries& s) {
  std::ostringstream os;
  os << "t\ths_norm\tq_norm\tweighted\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    os << format_double(s.times[i]) << '\t' << format_double(s.hs_norms[i]) << '\t' << format_double(s.q_norms[i])
       << '\t' << format_double(std::exp(s.alpha * s.times[i]) * s.hs_norms[i]) << '\n';
  }
  return os.str();
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 initialisation failed");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const ResonantMode& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const BlowUp& e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

void cmd_solve_torus(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare_output_dir(cfg);
  Stopwatch clock;
  const FrequencySpec freq = FrequencySpec::certify(cfg.omega, cfg.Lcheck);
  log << "omega = [" << join_doubles(freq.omega) << "], gamma_est = " << freq.gamma_est
      << (freq.certified ? " (certified" : " (not certified") << " up to |l| <= " << freq.Lcheck << ")\n";

  json report = {{"command", "solve-torus"}, {"config", config_echo(cfg)}, {"frequency", frequency_json(freq)}};
  auto finish = [&](const std::string& status) {
    report["status"] = status;
    report["timings"] = {{"wall_seconds", clock.seconds()}};
    write_json(dir / "solve_report.json", report);
  };

  TorusSolution sol;
  try {
    sol = solve_torus(cfg.forcing, freq, cfg.solver);
  } catch (const NoConvergence& e) {
    report["torus"] = torus_json(e.diagnostics());
    report["error"] = e.what();
    finish("no_convergence");
    update_manifest(dir, {"solve_report.json"});
    throw;
  } catch (const ResonantMode& e) {
    report["error"] = e.what();
    finish("resonant_mode");
    update_manifest(dir, {"solve_report.json"});
    throw;
  }

  const SnapshotMeta meta = {{"omega", join_doubles(freq.omega)},
                             {"epsilon", format_double(cfg.forcing.epsilon)},
                             {"iterations", std::to_string(sol.iterations)}};
  save_snapshot(dir / "U.snap", sol.U, meta);
  save_snapshot(dir / "P.snap", sol.P, meta);
  report["torus"] = torus_json(sol);
  report["torus"]["norm_U_over_epsilon"] = cfg.forcing.epsilon > 0.0 ? sol.norm_U / cfg.forcing.epsilon : 0.0;
  finish("converged");
  update_manifest(dir, {"U.snap", "P.snap", "solve_report.json"});

  log << "converged in " << sol.iterations << " iterations; pde residual " << format_double(sol.pde_residual)
      << ", ||U|| = " << format_double(sol.norm_U) << ", ||P|| = " << format_double(sol.norm_P) << '\n';
  log << "wrote " << (dir / "U.snap").string() << ", " << (dir / "P.snap").string() << '\n';
}

void cmd_simulate(const RunConfig& cfg, const fs::path& torus_path, std::ostream& log) {
  const fs::path dir = prepare_output_dir(cfg);
  Stopwatch clock;
  TorusSolution torus;
  torus.U = load_spacetime_snapshot(torus_path);
  if (!(torus.U.grid() == cfg.grid)) {
    throw SnapshotMismatch("torus snapshot grid " + torus.U.grid().describe() + " does not match the config grid " +
                           cfg.grid.describe());
  }
  torus.P = SpaceTimeField(cfg.grid.with_ncomp(1));
  const FrequencySpec freq = FrequencySpec::certify(cfg.omega, cfg.Lcheck);

  Rng rng(cfg.seed);
  const SpaceField v0 = random_perturbation(cfg.grid, cfg.sim.s, cfg.sim.delta, rng);

  json summary = {{"command", "simulate"},
                  {"config", config_echo(cfg)},
                  {"torus_snapshot", torus_path.string()},
                  {"torus_sha256", sha256_file(torus_path)}};
  auto write_outputs = [&](const DecaySeries& s) {
    write_file(dir / "trajectory.tsv", trajectory_tsv(s));
    summary["stability"] = series_json(s);
    summary["timings"] = {{"wall_seconds", clock.seconds()}};
    write_json(dir / "simulate_summary.json", summary);
    update_manifest(dir, {"trajectory.tsv", "simulate_summary.json"});
  };

  DecaySeries series;
  try {
    series = evolve(v0, torus, freq, cfg.sim);
  } catch (const BlowUp& e) {
    summary["status"] = "blow_up";
    write_outputs(e.partial());
    throw;
  }
  summary["status"] = "ok";
  write_outputs(series);

  log << "simulated " << series.times.size() - 1 << " steps to T = " << format_double(cfg.sim.T) << '\n';
  if (series.fit_valid) {
    log << "alpha_fit = " << format_double(series.alpha_fit) << " (r2 " << format_double(series.fit_r2)
        << "), q rate = " << format_double(series.q_alpha_fit) << '\n';
  } else {
    log << "alpha_fit undefined: no samples above the norm floor\n";
  }
  log << "weighted_sup = " << format_double(series.weighted_sup)
      << ", orbital constant = " << format_double(series.orbital_constant) << '\n';
}

VerifyReport cmd_verify(const RunConfig& cfg, std::optional<std::uint64_t> seed, std::ostream& log,
                        const LerayFn& leray) {
  const fs::path dir = prepare_output_dir(cfg);
  Stopwatch clock;
  VerifyInputs in;
  in.forcing = cfg.forcing;
  in.freq = FrequencySpec::certify(cfg.omega, cfg.Lcheck);
  in.solver = cfg.solver;
  in.sim = cfg.sim;
  in.seed = seed.value_or(cfg.seed);
  in.cases = cfg.verify_cases;
  in.sim_horizon = cfg.verify_horizon;
  in.leray = leray;
  const VerifyReport rep = run_verify(in);

  json checks = json::array();
  std::ostringstream table;
  table << "module\tcheck\tcases\tviolations\tmax_violation\ttolerance\tstatus\n";
  for (const auto& c : rep.checks) {
    checks.push_back({{"module", c.module},
                      {"name", c.name},
                      {"cases", c.cases},
                      {"violations", c.violations},
                      {"max_violation", c.max_violation},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed()},
                      {"note", c.note}});
    table << c.module << '\t' << c.name << '\t' << c.cases << '\t' << c.violations << '\t'
          << format_double(c.max_violation) << '\t' << format_double(c.tolerance) << '\t'
          << (c.passed() ? "pass" : "FAIL") << '\n';
    log << (c.passed() ? "pass  " : "FAIL  ") << std::left << std::setw(32) << c.name << " cases " << std::setw(4)
        << c.cases << " max " << format_double(c.max_violation) << " (tol " << format_double(c.tolerance) << ")\n";
  }
  json report = {{"command", "verify"},
                 {"config", config_echo(cfg)},
                 {"seed", in.seed},
                 {"checks", checks},
                 {"failures", rep.failures()},
                 {"timings", {{"wall_seconds", clock.seconds()}}}};
  write_json(dir / "verify_report.json", report);
  write_file(dir / "verify_table.tsv", table.str());
  update_manifest(dir, {"verify_report.json", "verify_table.tsv"});
  log << rep.failures() << " of " << rep.checks.size() << " checks failed (seed " << in.seed << ")\n";
  return rep;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const LerayFn& leray) {
  CLI::App app{"Quasi-periodic Navier-Stokes tori: construction, stability runs and invariant checks"};
  app.require_subcommand(1);
  std::string config_path, torus_path;
  std::optional<std::uint64_t> seed;

  auto* solve = app.add_subcommand("solve-torus", "Compute the invariant torus U, P for the configured forcing");
  solve->add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* sim = app.add_subcommand("simulate", "Evolve a random perturbation of a stored torus");
  sim->add_option("--config", config_path, "Run configuration (JSON)")->required();
  sim->add_option("--torus", torus_path, "U snapshot written by solve-torus")->required();
  auto* ver = app.add_subcommand("verify", "Run the invariant suite on seeded random inputs");
  ver->add_option("--config", config_path, "Run configuration (JSON)")->required();
  ver->add_option("--seed", seed, "Override the configured seed");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = load_run_config(config_path);
    if (solve->parsed()) {
      cmd_solve_torus(cfg, out);
    } else if (sim->parsed()) {
      cmd_simulate(cfg, torus_path, out);
    } else {
      const VerifyReport rep = cmd_verify(cfg, seed, out, leray);
      if (!rep.all_passed()) return kExitInvariant;
    }
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
  return kExitOk;
}

}  // namespace qpns::harness
