#include "qpns/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qpns/random_fields.hpp"
#include "qpns/reference.hpp"
#include "qpns/spectral.hpp"

namespace qpns {

bool VerifyReport::all_passed() const { return failures() == 0; }

int VerifyReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed(); }));
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

class Tally {
 public:
  Tally(std::string module, std::string name, double tolerance) {
    r_.module = std::move(module);
    r_.name = std::move(name);
    r_.tolerance = tolerance;
  }
  void add(double e) {
    ++r_.cases;
    if (std::isnan(e) || e > r_.max_violation) r_.max_violation = e;
    if (!(e <= r_.tolerance)) ++r_.violations;
  }
  void note(std::string n) { r_.note = std::move(n); }
  CheckResult done() const { return r_; }

 private:
  CheckResult r_;
};

double h0(const SpaceField& u) { return space_norm(u, 0.0); }

double rel(double err, double scale) { return scale > 0.0 ? err / scale : err; }

double reality(const SpaceField& u) { return rel(u.reality_defect(), std::max(1.0, u.max_abs())); }
double reality(const SpaceTimeField& u) { return rel(u.reality_defect(), std::max(1.0, u.max_abs())); }

SpaceField heat_factor(const SpaceField& u, double t) {
  return apply_radial_multiplier(u, [t](double q) { return std::exp(-t * q); });
}

class Suite {
 public:
  explicit Suite(const VerifyInputs& in)
      : in_(in), g_(in.forcing.fhat.grid().with_ncomp(in.forcing.fhat.grid().d)), rng_(in.seed) {
    leray_ = in.leray ? in.leray : LerayFn([](const SpaceField& u) { return leray_project(u); });
  }

  VerifyReport run() {
    VerifyReport rep;
    rep.seed = in_.seed;
    auto& out = rep.checks;
    out.push_back(reality_preservation());
    out.push_back(leray_idempotence());
    out.push_back(leray_orthogonality());
    out.push_back(leray_commutation());
    out.push_back(leray_divergence_free());
    out.push_back(zero_average_advection());
    out.push_back(norm_monotonicity());
    out.push_back(mean_split());
    out.push_back(convolution_oracle());
    out.push_back(convolution_oracle_spacetime());

    out.push_back(l_omega_round_trip());
    out.push_back(gain_of_two());
    solve();
    out.push_back(fixed_point_certificate());
    out.push_back(torus_invariants());
    out.push_back(iterate_invariants());
    out.push_back(linear_scaling());
    out.push_back(contraction_bound());
    out.push_back(contraction_scaling());

    out.push_back(heat_semigroup());
    out.push_back(heat_contractivity());
    out.push_back(heat_smoothing());
    out.push_back(appendix_maximum());
    out.push_back(duhamel_closed_form());
    out.push_back(duhamel_smoothing());
    simulate();
    out.push_back(evolve_divergence_mean());
    out.push_back(orbital_stability());
    out.push_back(asymptotic_decay());
    out.push_back(pressure_decay());
    out.push_back(integrator_order(Integrator::etd1));
    out.push_back(integrator_order(Integrator::etd2));
    return rep;
  }

 private:
  SpaceField zero_mean_vector() { return remove_mean(random_field(g_, rng_)); }

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }

  // -- spectral core -------------------------------------------------------

  CheckResult reality_preservation() {
    Tally t("spectral_core", "reality_preservation", 1e-12);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_field(g_, rng_);
      const SpaceField v = random_field(g_, rng_);
      t.add(reality(leray_(u)));
      t.add(reality(divergence(u)));
      t.add(reality(gradient(remove_mean(divergence(u)))));
      t.add(reality(inverse_laplacian(remove_mean(divergence(u)))));
      t.add(reality(advect(u, v)));
      t.add(reality(heat_propagate(u, uniform(0.0, 2.0))));
      const SpaceTimeField U = random_field_spacetime(g_, rng_);
      t.add(reality(sample_torus(U, in_.freq.omega, uniform(-10.0, 10.0))));
      t.add(reality(advect(U, random_field_spacetime(g_, rng_))));
      t.add(reality(leray_project(U)));
    }
    return t.done();
  }

  CheckResult leray_idempotence() {
    Tally t("spectral_core", "leray_idempotence", 1e-13);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField p = leray_(random_field(g_, rng_));
      t.add(rel(h0(leray_(p) - p), h0(p)));
    }
    return t.done();
  }

  CheckResult leray_orthogonality() {
    Tally t("spectral_core", "leray_orthogonality", 1e-12);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_field(g_, rng_);
      const SpaceField p = leray_(u);
      t.add(rel(std::abs(inner_product(u - p, p)), h0(u) * h0(u)));
    }
    return t.done();
  }

  CheckResult leray_commutation() {
    Tally t("spectral_core", "leray_commutation", 1e-13);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_field(g_, rng_);
      const double tau = uniform(0.0, 1.0);
      t.add(rel(h0(leray_(heat_factor(u, tau)) - heat_factor(leray_(u), tau)), h0(u)));
    }
    return t.done();
  }

  CheckResult leray_divergence_free() {
    Tally t("spectral_core", "leray_divergence_free", 1e-13);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_field(g_, rng_);
      t.add(rel(divergence_defect(leray_(u)), u.max_abs()));
    }
    return t.done();
  }

  CheckResult zero_average_advection() {
    Tally t("spectral_core", "zero_average_advection", 1.0);
    t.note("|mean| / tol_mean");
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_solenoidal(g_, rng_);
      const SpaceField w = advect(u, random_field(g_, rng_));
      t.add(mean_magnitude(w) / tol_mean(w));
    }
    return t.done();
  }

  CheckResult norm_monotonicity() {
    Tally t("spectral_core", "norm_monotonicity", 0.0);
    t.note("max(0, ||.||_{sigma,s} / ||.||_{sigma',s'} - 1)");
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceTimeField U = random_field_spacetime(g_, rng_);
      const double sigma = uniform(0.0, 3.0), s = uniform(0.0, 3.0);
      const SobolevIndex lo{sigma, s};
      const SobolevIndex hi{sigma + uniform(0.0, 1.0), s + uniform(0.0, 1.0)};
      t.add(std::max(0.0, mixed_norm(U, lo) / mixed_norm(U, hi) - 1.0));
    }
    return t.done();
  }

  CheckResult mean_split() {
    Tally t("spectral_core", "mean_split_pythagorean", 1e-12);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceTimeField U = random_field_spacetime(g_, rng_);
      const auto [mean, fluct] = mean_projections(U);
      const SobolevIndex idx{uniform(0.0, 3.0), uniform(0.0, 3.0)};
      const double a = mixed_norm(U, idx), b = mixed_norm(mean, idx), c = mixed_norm(fluct, idx);
      t.add(rel(std::abs(a * a - b * b - c * c), a * a));
      t.add(rel((mean + fluct - U).max_abs(), U.max_abs()));
    }
    return t.done();
  }

  GridSpec oracle_grid() const {
    GridSpec s = g_;
    s.Kx = std::min(s.Kx, 4);
    s.Kphi = std::min(s.Kphi, 3);
    return s;
  }

  CheckResult convolution_oracle() {
    Tally t("spectral_core", "convolution_oracle", 1e-10);
    const GridSpec s = oracle_grid();
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = random_field(s, rng_);
      const SpaceField v = random_field(s, rng_);
      const SpaceField ref = reference_advect(u, v);
      t.add(rel((advect(u, v) - ref).max_abs(), ref.max_abs()));
    }
    return t.done();
  }

  CheckResult convolution_oracle_spacetime() {
    Tally t("spectral_core", "convolution_oracle_spacetime", 1e-10);
    const GridSpec s = oracle_grid();
    const int n = std::max(1, in_.cases / 4);
    for (int k = 0; k < n; ++k) {
      const SpaceTimeField u = random_field_spacetime(s, rng_);
      const SpaceTimeField v = random_field_spacetime(s, rng_);
      const SpaceTimeField ref = reference_advect(u, v);
      t.add(rel((advect(u, v) - ref).max_abs(), ref.max_abs()));
    }
    return t.done();
  }

  // -- torus solver --------------------------------------------------------

  SpaceTimeField zero_space_mean_field() { return mean_projections(random_field_spacetime(g_, rng_)).fluctuation; }

  CheckResult l_omega_round_trip() {
    Tally t("torus_solver", "l_omega_round_trip", 1e-12);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceTimeField gfield = zero_space_mean_field();
      const SpaceTimeField back = apply_L_omega(invert_L_omega(gfield, in_.freq), in_.freq);
      t.add(rel((back - gfield).max_abs(), gfield.max_abs()));
    }
    return t.done();
  }

  CheckResult gain_of_two() {
    Tally t("torus_solver", "gain_of_two", 1.0 + 1e-12);
    t.note("||L^-1 g||_{sigma,s+2} / ||g||_{sigma,s}");
    const SobolevIndex idx = in_.solver.idx;
    const SobolevIndex up{idx.sigma, idx.s + 2.0};
    for (int k = 0; k < std::max(in_.cases, 100); ++k) {
      const SpaceTimeField gfield = zero_space_mean_field();
      t.add(mixed_norm(invert_L_omega(gfield, in_.freq), up) / mixed_norm(gfield, idx));
    }
    return t.done();
  }

  void solve() {
    torus_ = solve_torus(in_.forcing, in_.freq, in_.solver);
  }

  CheckResult fixed_point_certificate() {
    Tally t("torus_solver", "fixed_point_certificate", 1.0);
    t.note("||Phi(U) - U|| / (2 tol max(1, ||U||))");
    t.add(torus_.fixed_point_defect / (2.0 * in_.solver.tol_residual * std::max(1.0, torus_.norm_U)));
    return t.done();
  }

  CheckResult torus_invariants() {
    Tally t("torus_solver", "torus_invariants", 1.0);
    t.note("divergence defect / 1e-12, U(0,0) and P(l,0) / tol_mean");
    t.add(divergence_defect(torus_.U) / 1e-12);
    const std::size_t zero = torus_.U.num_modes() / 2;
    double mean = 0.0;
    for (int c = 0; c < torus_.U.ncomp(); ++c) mean = std::max(mean, std::abs(torus_.U(c, zero)));
    t.add(mean / tol_mean(torus_.U));
    t.add(space_mean_magnitude(torus_.P) / tol_mean(torus_.P));
    return t.done();
  }

  CheckResult iterate_invariants() {
    Tally t("torus_solver", "iterate_invariants", 1.0);
    t.note("per Picard iterate: divergence defect / 1e-12, space mean / tol_mean");
    const auto [f0, fperp] = mean_projections(in_.forcing.fhat);
    SpaceTimeField U0(g_);
    if (!in_.forcing.zero_space_mean && !f0.is_zero()) U0 = solve_averaged(in_.forcing.epsilon * f0, in_.freq);
    SpaceTimeField U(g_);
    for (int k = 0; k < torus_.iterations; ++k) {
      U = phi_map(U, in_.forcing, in_.freq, &U0);
      t.add(divergence_defect(U) / 1e-12);
      t.add(space_mean_magnitude(U) / tol_mean(U));
    }
    return t.done();
  }

  CheckResult linear_scaling() {
    Tally t("torus_solver", "linear_scaling", 0.05);
    t.note("spread of ||U||/eps over eps, eps/2, eps/4");
    if (in_.forcing.epsilon == 0.0 || in_.forcing.fhat.is_zero()) {
      t.note("skipped: no forcing");
      return t.done();
    }
    std::vector<double> ratios;
    for (double f : {1.0, 0.5, 0.25}) {
      ForcingSpec scaled = in_.forcing;
      scaled.epsilon *= f;
      SolverConfig cfg = in_.solver;
      cfg.contraction_probe = false;
      const TorusSolution s = solve_torus(scaled, in_.freq, cfg);
      ratios.push_back(s.norm_U / scaled.epsilon);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    t.add(*hi / *lo - 1.0);
    return t.done();
  }

  ContractionProbe probe_at(double eps_factor) {
    ForcingSpec scaled = in_.forcing;
    scaled.epsilon *= eps_factor;
    SolverConfig cfg = in_.solver;
    cfg.contraction_probe = true;
    const TorusSolution s = solve_torus(scaled, in_.freq, cfg);
    return *s.probe;
  }

  CheckResult contraction_bound() {
    Tally t("torus_solver", "contraction_bound", 0.5);
    t.note("max Lipschitz factor of Phi in the ball of radius 2||U*||");
    if (in_.forcing.epsilon == 0.0 || in_.forcing.fhat.is_zero()) {
      t.note("skipped: no forcing");
      return t.done();
    }
    probe_full_ = probe_at(1.0);
    t.add(probe_full_.lipschitz_max);
    return t.done();
  }

  CheckResult contraction_scaling() {
    Tally t("torus_solver", "contraction_scaling", 0.05);
    t.note("|Lip(eps/2) / Lip(eps) - 1/2| / (1/2)");
    if (in_.forcing.epsilon == 0.0 || in_.forcing.fhat.is_zero()) {
      t.note("skipped: no forcing");
      return t.done();
    }
    const ContractionProbe half = probe_at(0.5);
    t.add(std::abs(half.lipschitz_max / probe_full_.lipschitz_max - 0.5) / 0.5);
    return t.done();
  }

  // -- stability -----------------------------------------------------------

  CheckResult heat_semigroup() {
    Tally t("stability_sim", "heat_semigroup", 1e-12);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = zero_mean_vector();
      const double t1 = uniform(0.0, 2.0), t2 = uniform(0.0, 2.0);
      const SpaceField whole = heat_propagate(u, t1 + t2);
      t.add(rel(h0(heat_propagate(heat_propagate(u, t1), t2) - whole), h0(whole)));
    }
    return t.done();
  }

  CheckResult heat_contractivity() {
    Tally t("stability_sim", "heat_contractivity", 1.0 + 1e-12);
    t.note("||e^{t Lap} u||_{H^s} / (e^{-t} ||u||_{H^s})");
    const double s = in_.sim.s;
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = zero_mean_vector();
      for (double tau : {0.1, 1.0, 5.0, uniform(0.0, 5.0)}) {
        t.add(space_norm(heat_propagate(u, tau), s) / (std::exp(-tau) * space_norm(u, s)));
      }
    }
    return t.done();
  }

  CheckResult heat_smoothing() {
    Tally t("stability_sim", "heat_smoothing", 1.0);
    t.note("||e^{t Lap} u||_{H^s} / bound");
    const double s = std::max(in_.sim.s, 4.0);
    for (int k = 0; k < in_.cases; ++k) {
      const SpaceField u = zero_mean_vector();
      for (int n : {1, 2, 4}) {
        for (double alpha : {0.5, 0.9}) {
          for (double tau : {0.1, 1.0, 10.0}) {
            const double bound = std::sqrt(appendix_max(n, 2.0 * (1.0 - alpha) * tau)) * std::exp(-alpha * tau) *
                                 space_norm(u, s - n);
            t.add(space_norm(heat_propagate(u, tau), s) / bound);
          }
        }
      }
    }
    return t.done();
  }

  CheckResult appendix_maximum() {
    Tally t("stability_sim", "appendix_max_grid_scan", 1e-6);
    for (int n : {1, 2, 3}) {
      for (double zeta : {0.5, 1.0, 2.0}) {
        const double ymax = 10.0 * n / zeta;
        const int pts = 200000;
        double best = 0.0;
        for (int i = 0; i <= pts; ++i) {
          const double y = ymax * i / pts;
          best = std::max(best, std::pow(y, n) * std::exp(-zeta * y));
        }
        const double exact = appendix_max(n, zeta);
        t.add(std::abs(best - exact) / exact);
      }
    }
    return t.done();
  }

  CheckResult duhamel_closed_form() {
    Tally t("stability_sim", "duhamel_closed_form", 1e-8);
    for (int k = 0; k < std::max(1, in_.cases / 4); ++k) {
      const SpaceField w = zero_mean_vector();
      const double horizon = uniform(0.5, 3.0);
      SampledSeries f;
      const int n = 40;
      for (int i = 0; i <= n; ++i) {
        const double tau = horizon * i / n;
        f.times.push_back(tau);
        f.values.push_back(heat_propagate(w, tau));
      }
      const double at = f.times[std::uniform_int_distribution<int>(0, n)(rng_)];
      const SpaceField exact = at * heat_propagate(w, at);
      const SpaceField got = duhamel_apply(f, at);
      t.add(rel(h0(got - exact), std::max(h0(exact), 1e-300)));
    }
    return t.done();
  }

  double duhamel_weighted_sup(const SpaceField& g, double alpha, double horizon, double h) {
    SampledSeries f;
    const int n = static_cast<int>(std::lround(horizon / h));
    for (int i = 0; i <= n; ++i) {
      const double tau = horizon * i / n;
      f.times.push_back(tau);
      f.values.push_back(std::exp(-alpha * tau) * g);
    }
    const auto traj = duhamel_trajectory(f);
    double best = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      best = std::max(best, std::exp(alpha * f.times[i]) * space_norm(traj[i], in_.sim.s));
    }
    return best;
  }

  CheckResult duhamel_smoothing() {
    Tally t("stability_sim", "duhamel_smoothing", 1.0);
    t.note("|log2(sup(h) / sup(h/2))| for ||f(tau)||_{H^{s-1}} = e^{-alpha tau}");
    for (int k = 0; k < std::max(1, in_.cases / 10); ++k) {
      SpaceField gfield = zero_mean_vector();
      gfield *= 1.0 / space_norm(gfield, in_.sim.s - 1.0);
      for (double alpha : {0.5, 0.9}) {
        const double a = duhamel_weighted_sup(gfield, alpha, 10.0, 0.05);
        const double b = duhamel_weighted_sup(gfield, alpha, 10.0, 0.025);
        t.add(std::isfinite(a) && std::isfinite(b) ? std::abs(std::log2(a / b)) : std::numeric_limits<double>::infinity());
      }
    }
    return t.done();
  }

  double delta() const { return in_.sim.delta > 0.0 ? in_.sim.delta : 1e-3; }

  void simulate() {
    SimConfig cfg = in_.sim;
    cfg.delta = delta();
    cfg.T = std::min(cfg.T, in_.sim_horizon);
    Rng rng(in_.seed ^ 0x9e3779b97f4a7c15ULL);
    const SpaceField v0 = random_perturbation(g_, cfg.s, cfg.delta, rng);
    try {
      series_ = evolve(v0, torus_, in_.freq, cfg);
    } catch (const BlowUp& e) {
      series_ = e.partial();
    }
  }

  CheckResult evolve_divergence_mean() {
    Tally t("stability_sim", "evolve_divergence_mean", 1e-11);
    t.note("max divergence and mean defects along the trajectory, relative to delta");
    t.add(series_.max_divergence_defect / series_.delta);
    t.add(series_.max_mean_defect / series_.delta);
    return t.done();
  }

  CheckResult orbital_stability() {
    Tally t("stability_sim", "orbital_stability", 5.0);
    t.note("sup ||v(t)||_{H^s} / delta");
    t.add(series_.blow_up ? std::numeric_limits<double>::infinity() : series_.orbital_constant);
    return t.done();
  }

  CheckResult asymptotic_decay() {
    Tally t("stability_sim", "asymptotic_decay", 0.0);
    t.note("max(0, alpha - alpha_fit) and max(0, 0.99 - r2)");
    t.add(series_.fit_valid ? std::max(0.0, series_.alpha - series_.alpha_fit) : 1.0);
    t.add(series_.fit_valid ? std::max(0.0, 0.99 - series_.fit_r2) : 1.0);
    return t.done();
  }

  CheckResult pressure_decay() {
    Tally t("stability_sim", "pressure_decay", 0.0);
    t.note("max(0, alpha - q_alpha_fit)");
    t.add(series_.q_fit_valid ? std::max(0.0, series_.alpha - series_.q_alpha_fit) : 1.0);
    return t.done();
  }

  CheckResult integrator_order(Integrator which) {
    const int order = which == Integrator::etd1 ? 1 : 2;
    Tally t("stability_sim", "integrator_order_" + to_string(which), 0.2);
    t.note("|ratio / 2^order - 1| for successive dt halvings of ||v(T)||");
    SimConfig cfg = in_.sim;
    cfg.integrator = which;
    cfg.delta = delta();
    cfg.T = 1.0;
    cfg.burn_in = 0.0;
    const double base = std::min(0.01, 0.5 * step_limit(Integrator::etd1) / (g_.Kx * g_.Kx));
    Rng rng(in_.seed + 17);
    const SpaceField v0 = random_perturbation(g_, cfg.s, cfg.delta, rng);
    std::vector<double> finals;
    for (double f : {1.0, 0.5, 0.25}) {
      cfg.dt = base * f;
      finals.push_back(evolve(v0, torus_, in_.freq, cfg).hs_norms.back());
    }
    const double ratio = std::abs(finals[0] - finals[1]) / std::abs(finals[1] - finals[2]);
    t.add(std::abs(ratio / std::pow(2.0, order) - 1.0));
    return t.done();
  }

  const VerifyInputs& in_;
  GridSpec g_;
  Rng rng_;
  LerayFn leray_;
  TorusSolution torus_;
  ContractionProbe probe_full_;
  DecaySeries series_;
};

}  // namespace

VerifyReport run_verify(const VerifyInputs& in) { return Suite(in).run(); }

}  // namespace qpns
