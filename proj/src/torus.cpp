#include "qpns/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qpns/random_fields.hpp"
#include "qpns/spectral.hpp"

namespace qpns {

namespace {

constexpr Complex kI{0.0, 1.0};

// omega . l for every angle mode, in lattice order.
std::vector<double> angle_frequencies(const GridSpec& g, const FrequencySpec& freq) {
  if (freq.nu() != g.nu) {
    throw GridMismatch("frequency has nu = " + std::to_string(freq.nu()) + ", grid nu = " + std::to_string(g.nu));
  }
  const auto ls = angle_wavevectors(g);
  const std::size_t na = g.angle_modes();
  std::vector<double> out(na);
  for (std::size_t a = 0; a < na; ++a) out[a] = freq.dot(std::span<const int>(ls.data() + a * g.nu, g.nu));
  return out;
}

SobolevIndex lowered(SobolevIndex idx, double by) { return {idx.sigma, std::max(0.0, idx.s - by)}; }

}  // namespace

DiophantineCertificate certify_diophantine(std::span<const double> omega, int Lcheck) {
  if (omega.empty()) throw std::invalid_argument("certify_diophantine: empty omega");
  if (Lcheck < 1) throw std::invalid_argument("certify_diophantine: Lcheck must be >= 1");
  if (std::all_of(omega.begin(), omega.end(), [](double w) { return w == 0.0; })) {
    throw std::invalid_argument("certify_diophantine: omega must be nonzero");
  }
  const int nu = static_cast<int>(omega.size());
  const Lattice lat(nu, Lcheck);
  std::vector<int> l(nu);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lat.size(); ++k) {
    if (k == lat.size() / 2) continue;  // l = 0
    lat.unravel(k, l);
    double dot = 0.0;
    double sq = 0.0;
    for (int i = 0; i < nu; ++i) {
      dot += omega[i] * l[i];
      sq += static_cast<double>(l[i]) * l[i];
    }
    best = std::min(best, std::abs(dot) * std::pow(std::sqrt(sq), nu));
  }
  return {best, best > 0.0};
}

FrequencySpec FrequencySpec::certify(std::vector<double> omega, int Lcheck) {
  const auto cert = certify_diophantine(omega, Lcheck);
  FrequencySpec f;
  f.omega = std::move(omega);
  f.Lcheck = Lcheck;
  f.gamma_est = cert.gamma_est;
  f.certified = cert.ok;
  f.gamma = cert.ok ? std::min(1.0, cert.gamma_est) : 0.0;
  return f;
}

double FrequencySpec::dot(std::span<const int> l) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) acc += omega[i] * l[i];
  return acc;
}

void ForcingSpec::validate() const {
  const GridSpec& g = fhat.grid();
  if (g.ncomp != g.d) throw std::invalid_argument("forcing: expected a vector field with ncomp == d");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("forcing: epsilon must lie in [0, 1)");
  const double tol = 1e-12 * (1.0 + fhat.max_abs());
  if (fhat.reality_defect() > tol) throw std::invalid_argument("forcing: coefficients are not conjugate-symmetric");
  const std::size_t origin = fhat.mode_index(fhat.angle_lattice().size() / 2, fhat.zero_space_mode());
  for (int c = 0; c < g.ncomp; ++c) {
    if (std::abs(fhat(c, origin)) > tol) throw std::invalid_argument("forcing: nonzero space-time average");
  }
  if (zero_space_mean && space_mean_magnitude(fhat) > tol) {
    throw std::invalid_argument("forcing: zero_space_mean is set but some f(l, 0) != 0");
  }
}

SolverConfig SolverConfig::defaults_for(const GridSpec& grid) {
  SolverConfig c;
  c.idx = {grid.nu / 2.0 + 2.0, grid.d / 2.0 + 1.5};
  return c;
}

void SolverConfig::validate() const {
  idx.validate();
  if (!(tol_residual > 0.0)) throw std::invalid_argument("solver: tol_residual must be > 0");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (contraction_probe && probe_pairs < 1) throw std::invalid_argument("solver: probe_pairs must be >= 1");
}

SpaceTimeField solve_averaged(const SpaceTimeField& rhs, const FrequencySpec& freq) {
  const GridSpec& g = rhs.grid();
  const auto wl = angle_frequencies(g, freq);
  const std::size_t z = rhs.zero_space_mode();
  const std::size_t a0 = rhs.angle_modes() / 2;
  const double tol = tol_mean(rhs);
  SpaceTimeField out(g);
  for (int c = 0; c < g.ncomp; ++c) {
    if (std::abs(rhs(c, rhs.mode_index(a0, z))) > tol) {
      throw NonZeroMean("solve_averaged: right-hand side has a nonzero space-time average");
    }
    for (std::size_t a = 0; a < rhs.angle_modes(); ++a) {
      if (a == a0) continue;
      const Complex v = rhs(c, rhs.mode_index(a, z));
      if (v == Complex{}) continue;
      if (std::abs(wl[a]) < kGammaFloor) {
        const auto l = rhs.angle_lattice().unravel(a);
        std::string ls;
        for (int x : l) ls += std::to_string(x) + " ";
        throw ResonantMode("solve_averaged: resonant angle mode l = ( " + ls + ") with |omega.l| = " +
                           std::to_string(std::abs(wl[a])));
      }
      out(c, out.mode_index(a, z)) = v / (kI * wl[a]);
    }
  }
  return out;
}

SpaceTimeField invert_L_omega(const SpaceTimeField& g, const FrequencySpec& freq) {
  const auto wl = angle_frequencies(g.grid(), freq);
  if (space_mean_magnitude(g) > tol_mean(g)) {
    throw NonZeroSpaceMean("invert_L_omega: input has nonzero space mean");
  }
  const auto jsq = space_wavenumber_sq(g.grid());
  const std::size_t xm = g.space_modes();
  SpaceTimeField out(g.grid());
  for (int c = 0; c < g.ncomp(); ++c) {
    const auto gc = g.component(c);
    auto oc = out.component(c);
    for (std::size_t a = 0; a < g.angle_modes(); ++a) {
      for (std::size_t m = 0; m < xm; ++m) {
        if (jsq[m] == 0.0) continue;
        oc[a * xm + m] = gc[a * xm + m] / Complex(jsq[m], wl[a]);
      }
    }
  }
  return out;
}

SpaceTimeField apply_L_omega(const SpaceTimeField& U, const FrequencySpec& freq) {
  const auto wl = angle_frequencies(U.grid(), freq);
  const auto jsq = space_wavenumber_sq(U.grid());
  const std::size_t xm = U.space_modes();
  SpaceTimeField out(U.grid());
  for (int c = 0; c < U.ncomp(); ++c) {
    const auto uc = U.component(c);
    auto oc = out.component(c);
    for (std::size_t a = 0; a < U.angle_modes(); ++a) {
      for (std::size_t m = 0; m < xm; ++m) oc[a * xm + m] = Complex(jsq[m], wl[a]) * uc[a * xm + m];
    }
  }
  return out;
}

SpaceTimeField phi_map(const SpaceTimeField& U, const ForcingSpec& forcing, const FrequencySpec& freq,
                       const SpaceTimeField* mean_flow) {
  if (!(U.grid() == forcing.fhat.grid())) detail::throw_grid_mismatch(U.grid(), forcing.fhat.grid());
  if (space_mean_magnitude(U) > tol_mean(U)) throw NonZeroSpaceMean("phi_map: U has nonzero space mean");

  SpaceTimeField rhs = forcing.epsilon * forcing.fhat;
  if (!U.is_zero()) {
    SpaceTimeField carrier = U;
    if (mean_flow) carrier += *mean_flow;
    rhs -= advect(carrier, U);
  }
  // The j = 0 slice of L(U.grad U) vanishes analytically; pi0perp drops the
  // averaged forcing, which is handled by solve_averaged.
  return invert_L_omega(mean_projections(leray_project(rhs)).fluctuation, freq);
}

SpaceTimeField recover_pressure(const SpaceTimeField& U, const ForcingSpec& forcing) {
  SpaceTimeField a = advect(U, U);
  a -= forcing.epsilon * forcing.fhat;
  return inverse_laplacian(divergence(a));
}

double projected_residual(const SpaceTimeField& U, const ForcingSpec& forcing, const FrequencySpec& freq,
                          SobolevIndex idx) {
  SpaceTimeField r = apply_L_omega(U, freq);
  r += leray_project(advect(U, U));
  r -= forcing.epsilon * leray_project(forcing.fhat);
  return mixed_norm(r, lowered(idx, 2.0));
}

double momentum_residual(const SpaceTimeField& U, const SpaceTimeField& P, const ForcingSpec& forcing,
                         const FrequencySpec& freq, SobolevIndex idx) {
  SpaceTimeField r = apply_L_omega(U, freq);
  r += advect(U, U);
  r += gradient(P);
  r -= forcing.epsilon * forcing.fhat;
  return mixed_norm(r, lowered(idx, 2.0));
}

ContractionProbe probe_contraction(const ForcingSpec& forcing, const FrequencySpec& freq,
                                   const SpaceTimeField& mean_flow, SobolevIndex idx, double radius, int pairs,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GridSpec& g = forcing.fhat.grid();
  auto draw = [&] {
    SpaceTimeField u = random_solenoidal_spacetime(g, rng);
    const double r = radius * (1.0 - unit(rng));  // (0, radius]
    return u * (r / mixed_norm(u, idx));
  };
  ContractionProbe out;
  out.radius = radius;
  out.pairs = pairs;
  double sum = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const SpaceTimeField u1 = draw();
    const SpaceTimeField u2 = draw();
    const double den = mixed_norm(u1 - u2, idx);
    const double num = mixed_norm(phi_map(u1, forcing, freq, &mean_flow) - phi_map(u2, forcing, freq, &mean_flow), idx);
    const double lip = den > 0.0 ? num / den : 0.0;
    out.lipschitz_max = std::max(out.lipschitz_max, lip);
    sum += lip;
  }
  out.lipschitz_mean = pairs > 0 ? sum / pairs : 0.0;
  return out;
}

TorusSolution solve_torus(const ForcingSpec& forcing, const FrequencySpec& freq, const SolverConfig& cfg) {
  forcing.validate();
  cfg.validate();
  const GridSpec& g = forcing.fhat.grid();
  const double eps = forcing.epsilon;

  auto [f0, fperp] = mean_projections(forcing.fhat);
  SpaceTimeField U0(g);
  if (!forcing.zero_space_mean && !f0.is_zero()) U0 = solve_averaged(eps * f0, freq);

  TorusSolution sol;
  sol.gamma_est = freq.gamma_est;
  SpaceTimeField U(g);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    SpaceTimeField next = phi_map(U, forcing, freq, &U0);
    const double diff = mixed_norm(next - U, cfg.idx);
    const double scale = std::max(1.0, mixed_norm(U, cfg.idx));
    sol.residual_history.push_back(diff);
    sol.iterations = k;
    U = std::move(next);
    if (eps > 0.0) sol.c_star = std::max(sol.c_star, mixed_norm(U + U0, cfg.idx) / eps);
    if (!std::isfinite(diff)) break;
    if (diff <= cfg.tol_residual * scale) {
      sol.converged = true;
      break;
    }
  }

  sol.fixed_point_defect = mixed_norm(phi_map(U, forcing, freq, &U0) - U, cfg.idx);
  sol.U = U + U0;
  sol.P = recover_pressure(sol.U, forcing);
  sol.norm_U = mixed_norm(sol.U, cfg.idx);
  sol.norm_P = mixed_norm(sol.P, cfg.idx);
  sol.pde_residual = projected_residual(sol.U, forcing, freq, cfg.idx);
  sol.momentum_residual = momentum_residual(sol.U, sol.P, forcing, freq, cfg.idx);
  if (cfg.contraction_probe) {
    sol.probe = probe_contraction(forcing, freq, U0, cfg.idx, 2.0 * sol.norm_U, cfg.probe_pairs, cfg.probe_seed);
  }
  if (!sol.converged) {
    throw NoConvergence("solve_torus: no convergence after " + std::to_string(sol.iterations) + " iterations",
                        std::move(sol));
  }
  return sol;
}

}  // namespace qpns
