#include "qpns/harness/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qpns/snapshot.hpp"

namespace qpns::harness {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigParse("config: '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigParse("config: unknown key '" + key + "' in '" + section + "'");
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& section) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigParse("config: '" + section + "." + key + "' has the wrong type");
  }
}

std::vector<int> int_list(const json& obj, const std::string& key, std::size_t size, const std::string& where) {
  if (!obj.contains(key)) throw ConfigParse("config: " + where + " is missing '" + key + "'");
  std::vector<int> out;
  try {
    out = obj.at(key).get<std::vector<int>>();
  } catch (const json::exception&) {
    throw ConfigParse("config: " + where + "." + key + " must be a list of integers");
  }
  if (out.size() != size) {
    throw ConfigParse("config: " + where + "." + key + " must have " + std::to_string(size) + " entries");
  }
  return out;
}

GridSpec parse_grid(const json& j) {
  if (!j.contains("grid")) throw ConfigParse("config: missing 'grid' section");
  const json& s = j.at("grid");
  check_keys(s, "grid", {"nu", "d", "Kphi", "Kx"});
  GridSpec g;
  g.nu = get_or(s, "nu", g.nu, "grid");
  g.d = get_or(s, "d", g.d, "grid");
  g.Kphi = get_or(s, "Kphi", g.Kphi, "grid");
  g.Kx = get_or(s, "Kx", g.Kx, "grid");
  g.ncomp = g.d;
  g.validate();
  return g;
}

void parse_forcing(const json& j, const std::filesystem::path& base, RunConfig& cfg) {
  cfg.forcing.fhat = SpaceTimeField(cfg.grid);
  if (!j.contains("forcing")) return;
  const json& s = j.at("forcing");
  check_keys(s, "forcing", {"epsilon", "zero_space_mean", "modes", "file"});
  cfg.forcing.epsilon = get_or(s, "epsilon", 0.0, "forcing");
  cfg.forcing.zero_space_mean = get_or(s, "zero_space_mean", false, "forcing");

  SpaceTimeField& f = cfg.forcing.fhat;
  if (s.contains("file")) {
    const std::filesystem::path p = base / get_or<std::string>(s, "file", "", "forcing");
    SpaceTimeField loaded = load_spacetime_snapshot(p, nullptr, SnapshotReadOptions{true});
    if (!(loaded.grid() == f.grid())) {
      throw ConfigParse("config: forcing file grid " + loaded.grid().describe() + " does not match " +
                        f.grid().describe());
    }
    f = std::move(loaded);
  }
  if (!s.contains("modes")) return;
  if (!s.at("modes").is_array()) throw ConfigParse("config: forcing.modes must be a list");
  std::set<std::size_t> seen;
  int count = 0;
  for (const json& m : s.at("modes")) {
    const std::string where = "forcing.modes[" + std::to_string(count++) + "]";
    check_keys(m, where, {"l", "j", "comp", "re", "im"});
    const auto l = int_list(m, "l", cfg.grid.nu, where);
    const auto jj = int_list(m, "j", cfg.grid.d, where);
    const int comp = get_or(m, "comp", -1, where);
    if (comp < 0 || comp >= cfg.grid.d) throw ConfigParse("config: " + where + ".comp out of range");
    if (!f.angle_lattice().contains(l) || !f.space_lattice().contains(jj)) {
      throw ConfigParse("config: " + where + " lies outside the truncation");
    }
    const std::size_t idx = f.mode_index(l, jj);
    const std::size_t key = static_cast<std::size_t>(comp) * f.num_modes() + std::min(idx, f.mirror(idx));
    if (!seen.insert(key).second) throw ConfigParse("config: " + where + " repeats a mode");
    f.set_pair(comp, l, jj, Complex(get_or(m, "re", 0.0, where), get_or(m, "im", 0.0, where)));
  }
}

}  // namespace

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    check_keys(j, "<root>", {"grid", "frequency", "forcing", "solver", "sim", "verify", "seed", "output_dir"});
    cfg.grid = parse_grid(j);

    if (!j.contains("frequency")) throw ConfigParse("config: missing 'frequency' section");
    const json& fq = j.at("frequency");
    check_keys(fq, "frequency", {"omega", "Lcheck"});
    cfg.omega = get_or(fq, "omega", std::vector<double>{}, "frequency");
    cfg.Lcheck = get_or(fq, "Lcheck", cfg.Lcheck, "frequency");
    if (static_cast<int>(cfg.omega.size()) != cfg.grid.nu) {
      throw ConfigParse("config: frequency.omega must have nu = " + std::to_string(cfg.grid.nu) + " entries");
    }
    if (cfg.Lcheck < 1) throw ConfigParse("config: frequency.Lcheck must be >= 1");

    parse_forcing(j, base_dir, cfg);
    cfg.forcing.validate();

    cfg.solver = SolverConfig::defaults_for(cfg.grid);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, "solver", {"sigma", "s", "tol_residual", "max_iter", "contraction_probe", "probe_pairs", "probe_seed"});
      cfg.solver.idx.sigma = get_or(s, "sigma", cfg.solver.idx.sigma, "solver");
      cfg.solver.idx.s = get_or(s, "s", cfg.solver.idx.s, "solver");
      cfg.solver.tol_residual = get_or(s, "tol_residual", cfg.solver.tol_residual, "solver");
      cfg.solver.max_iter = get_or(s, "max_iter", cfg.solver.max_iter, "solver");
      cfg.solver.contraction_probe = get_or(s, "contraction_probe", cfg.solver.contraction_probe, "solver");
      cfg.solver.probe_pairs = get_or(s, "probe_pairs", cfg.solver.probe_pairs, "solver");
      cfg.solver.probe_seed = get_or(s, "probe_seed", cfg.solver.probe_seed, "solver");
    }
    cfg.solver.validate();

    if (j.contains("sim")) {
      const json& s = j.at("sim");
      check_keys(s, "sim", {"alpha", "delta", "dt", "T", "s", "integrator", "burn_in"});
      cfg.sim.alpha = get_or(s, "alpha", cfg.sim.alpha, "sim");
      cfg.sim.delta = get_or(s, "delta", cfg.sim.delta, "sim");
      cfg.sim.dt = get_or(s, "dt", cfg.sim.dt, "sim");
      cfg.sim.T = get_or(s, "T", cfg.sim.T, "sim");
      cfg.sim.s = get_or(s, "s", cfg.sim.s, "sim");
      cfg.sim.burn_in = get_or(s, "burn_in", cfg.sim.burn_in, "sim");
      cfg.sim.integrator = parse_integrator(get_or<std::string>(s, "integrator", to_string(cfg.sim.integrator), "sim"));
    }
    cfg.sim.validate();

    if (j.contains("verify")) {
      const json& s = j.at("verify");
      check_keys(s, "verify", {"cases", "horizon"});
      cfg.verify_cases = get_or(s, "cases", cfg.verify_cases, "verify");
      cfg.verify_horizon = get_or(s, "horizon", cfg.verify_horizon, "verify");
      if (cfg.verify_cases < 1) throw ConfigParse("config: verify.cases must be >= 1");
      if (!(cfg.verify_horizon > 1.0)) throw ConfigParse("config: verify.horizon must be > 1");
    }

    cfg.seed = get_or(j, "seed", cfg.seed, "<root>");
    if (j.contains("output_dir")) cfg.output_dir = get_or<std::string>(j, "output_dir", "", "<root>");
    cfg.output_dir = (base_dir / cfg.output_dir).lexically_normal();
  } catch (const std::invalid_argument& e) {
    throw ConfigParse(std::string("config: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigParse(std::string("config: ") + e.what());
  }
  cfg.source = j;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigParse("config: " + path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("QPNS_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.output_dir;
}

}  // namespace qpns::harness
