#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "qpns/random_fields.hpp"
#include "qpns/spectral.hpp"
#include "qpns/stability.hpp"

using namespace qpns;
using A1 = std::array<int, 1>;
using A2 = std::array<int, 2>;

namespace {

const GridSpec kGrid{1, 2, 2, 4, 2};

FrequencySpec golden() { return FrequencySpec::certify({std::numbers::phi}, 50); }

TorusSolution no_torus(const GridSpec& g = kGrid) {
  TorusSolution t;
  t.U = SpaceTimeField(g);
  t.P = SpaceTimeField(g.with_ncomp(1));
  return t;
}

TorusSolution small_torus(double eps = 1e-3) {
  ForcingSpec f{SpaceTimeField(kGrid), eps, false};
  f.fhat.set_pair(1, A1{1}, A2{1, 0}, 0.5);
  f.fhat.set_pair(0, A1{0}, A2{0, 1}, Complex(0.0, -0.5));
  f.fhat.set_pair(0, A1{1}, A2{1, 2}, Complex(0.3, 0.2));
  f.fhat.set_pair(0, A1{1}, A2{0, 0}, 0.25);
  return solve_torus(f, golden(), SolverConfig::defaults_for(kGrid));
}

// Divergence-free field supported on |j|^2 = 1.
SpaceField unit_shell(const GridSpec& g, double scale) {
  SpaceField v(g);
  v.set_pair(1, A2{1, 0}, Complex(0.6, -0.2) * scale);
  v.set_pair(0, A2{0, 1}, Complex(0.1, 0.3) * scale);
  return v;
}

SpaceField zero_mean(const GridSpec& g, Rng& rng) { return remove_mean(random_field(g, rng)); }

}  // namespace

TEST_CASE("heat_propagate examples") {
  Rng rng(1);
  const SpaceField u = zero_mean(kGrid, rng);
  CHECK((heat_propagate(u, 0.0) - u).max_abs() == 0.0);

  const SpaceField e = unit_shell(kGrid, 1.0);
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK((heat_propagate(e, t) - std::exp(-t) * e).max_abs() <= 1e-15);
  }
  SpaceField with_mean = u;
  with_mean.set_pair(0, A2{0, 0}, 3.0);
  CHECK(mean_magnitude(heat_propagate(with_mean, 0.5)) == 0.0);
  CHECK_THROWS_AS(heat_propagate(u, -1e-3), NegativeTime);
}

TEST_CASE("property: heat semigroup and contractivity") {
  oracle::Gen gen(17);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec g = gen.grid(0, 5);
    Rng rng(trial);
    const SpaceField u = zero_mean(g, rng);
    const double t1 = gen.real(0, 2), t2 = gen.real(0, 2), s = gen.real(0, 4);
    const SpaceField whole = heat_propagate(u, t1 + t2);
    CHECK(space_norm(heat_propagate(heat_propagate(u, t1), t2) - whole, 0) <= 1e-12 * space_norm(whole, 0));
    for (double t : {0.1, 1.0, 5.0, t1}) {
      if (space_norm(heat_propagate(u, t), s) > std::exp(-t) * space_norm(u, s)) ++violations;
    }
  }
  CHECK(violations == 0);

  const SpaceField e = unit_shell(kGrid, 2.0);
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK(space_norm(heat_propagate(e, t), 2.5) == doctest::Approx(std::exp(-t) * space_norm(e, 2.5)).epsilon(1e-12));
  }
}

TEST_CASE("appendix_max values") {
  CHECK(appendix_max(1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(appendix_max(2, 1.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-15));
  for (int n : {1, 2, 3}) {
    for (double zeta : {0.5, 1.0, 2.0}) {
      CHECK(oracle::grid_scan_max(n, zeta) == doctest::Approx(appendix_max(n, zeta)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(appendix_max(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(appendix_max(1, 0.0), std::invalid_argument);
}

TEST_CASE("smoothing bound with the sharp constant") {
  // sqrt(appendix_max(n, 2(1-a)t)) = C(n) t^{-n/2} (1-a)^{-n/2}, C(n) = (n/2)^{n/2} e^{-n/2}
  for (int n : {1, 2, 4}) {
    for (double a : {0.5, 0.9}) {
      for (double t : {0.1, 1.0, 10.0}) {
        const double cn = std::pow(n / 2.0, n / 2.0) * std::exp(-n / 2.0);
        CHECK(std::sqrt(appendix_max(n, 2 * (1 - a) * t)) ==
              doctest::Approx(cn * std::pow(t, -n / 2.0) * std::pow(1 - a, -n / 2.0)).epsilon(1e-13));
      }
    }
  }
  oracle::Gen gen(23);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const GridSpec g = gen.grid(0, 5);
    Rng rng(trial);
    const SpaceField u = zero_mean(g, rng);
    const double s = 4.5;
    for (int n : {1, 2, 4}) {
      for (double a : {0.5, 0.9}) {
        for (double t : {0.1, 1.0, 10.0}) {
          const double bound = std::sqrt(appendix_max(n, 2 * (1 - a) * t)) * std::exp(-a * t) * space_norm(u, s - n);
          if (space_norm(heat_propagate(u, t), s) > bound) ++violations;
        }
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("etd phi functions") {
  for (double z : {-40.0, -3.0, -0.6, -0.5, -0.4999, -1e-3, -1e-9, 0.0, 1e-6, 0.3}) {
    const long double zl = z;
    const long double p1 = z == 0 ? 1.0L : std::expm1(zl) / zl;
    const long double p2 = z == 0 ? 0.5L : (std::expm1(zl) - zl) / (zl * zl);
    CHECK(etd_phi1(z) == doctest::Approx(double(p1)).epsilon(1e-12));
    if (std::abs(z) > 1e-4) CHECK(etd_phi2(z) == doctest::Approx(double(p2)).epsilon(1e-9));
  }
  CHECK(etd_phi2(-1e-9) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(etd_phi1(0.0) == 1.0);
  CHECK(etd_phi2(0.0) == 0.5);
}

TEST_CASE("perturbation_rhs examples") {
  Rng rng(5);
  const SpaceField uw = sample_torus(small_torus().U, golden().omega, 0.7);
  const SpaceField zero(kGrid);
  CHECK(perturbation_rhs(zero, uw).is_zero());

  const SpaceField v = random_perturbation(kGrid, 2.5, 1.0, rng);
  const SpaceField expect = -1.0 * leray_project(advect(v, v));
  CHECK((perturbation_rhs(v, zero) - expect).max_abs() <= 1e-15 * (1 + expect.max_abs()));
  CHECK((perturbation_rhs(v, zero) + leray_project(oracle::advect(v, v))).max_abs() <= 1e-12 * expect.max_abs());

  const SpaceField lin = perturbation_rhs(v, uw, ConvectiveTerms::linearized);
  for (double a : {2.0, -1.0}) {
    CHECK((perturbation_rhs(a * v, uw, ConvectiveTerms::linearized) - a * lin).max_abs() <= 1e-14 * lin.max_abs());
  }
  CHECK(perturbation_rhs(v, uw, ConvectiveTerms::none).is_zero());
}

TEST_CASE("recover_pressure_q examples") {
  Rng rng(6);
  const SpaceField zero(kGrid);
  const SpaceField uw = sample_torus(small_torus().U, golden().omega, 0.2);
  CHECK(recover_pressure_q(zero, uw).is_zero());

  const SpaceField single = unit_shell(kGrid, 1.0);
  const SpaceField v = single + random_perturbation(kGrid, 2.5, 0.5, rng);
  for (const SpaceField* w : {&single, &v}) {
    const SpaceField q = recover_pressure_q(*w, zero);
    const SpaceField expect = inverse_laplacian(divergence(oracle::advect(*w, *w)));
    CHECK((q - expect).max_abs() <= 1e-12 * (1e-300 + std::max(expect.max_abs(), w->max_abs())));
    CHECK(mean_magnitude(q) == 0.0);
  }
}

TEST_CASE("evolve from v0 = 0 stays at zero") {
  SimConfig cfg;
  cfg.T = 2.0;
  cfg.dt = 1e-2;
  const auto s = evolve(SpaceField(kGrid), small_torus(), golden(), cfg);
  for (double n : s.hs_norms) CHECK(n == 0.0);
  CHECK_FALSE(s.fit_valid);
  CHECK(std::isnan(s.alpha_fit));
  CHECK(s.weighted_sup == 0.0);
}

TEST_CASE("evolve reproduces pure heat flow without coupling") {
  SimConfig cfg;
  cfg.T = 10.0;
  cfg.dt = 1e-2;
  cfg.delta = 1e-3;
  cfg.terms = ConvectiveTerms::none;
  SpaceField v0 = unit_shell(kGrid, 1.0);
  v0 *= cfg.delta / space_norm(v0, cfg.s);
  const auto s = evolve(v0, no_torus(), golden(), cfg);
  for (std::size_t i = 0; i < s.times.size(); i += 100) {
    CHECK(s.hs_norms[i] == doctest::Approx(std::exp(-s.times[i]) * cfg.delta).epsilon(1e-12));
  }
  CHECK(s.alpha_fit == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s.fit_r2 > 0.999999);
  CHECK(weighted_norm(s, 0.9, cfg.s) == doctest::Approx(cfg.delta).epsilon(1e-12));
}

TEST_CASE("evolve around a torus decays and keeps its invariants") {
  const auto torus = small_torus();
  SimConfig cfg;
  cfg.T = 8.0;
  cfg.dt = 2e-3;
  Rng rng(42);
  const SpaceField v0 = random_perturbation(kGrid, cfg.s, cfg.delta, rng);
  const auto s = evolve(v0, torus, golden(), cfg);
  MESSAGE("alpha_fit " << s.alpha_fit << " r2 " << s.fit_r2 << " q rate " << s.q_alpha_fit << " C "
                       << s.orbital_constant);
  CHECK_FALSE(s.blow_up);
  CHECK(s.alpha_fit >= 0.9);
  CHECK(s.fit_r2 >= 0.99);
  CHECK(s.weighted_sup <= 5.0 * cfg.delta);
  CHECK(s.orbital_constant <= 5.0);
  CHECK(s.q_fit_valid);
  CHECK(s.q_alpha_fit >= s.alpha_fit - 0.05);
  CHECK(s.max_divergence_defect <= 1e-11 * cfg.delta);
  CHECK(s.max_mean_defect <= 1e-11 * cfg.delta);
  CHECK(s.times.size() == 4001);
  CHECK(s.times.back() == cfg.T);
}

TEST_CASE("evolve preconditions and step heuristic") {
  const auto torus = small_torus();
  Rng rng(3);
  SimConfig cfg;
  cfg.T = 1.0;
  const SpaceField v0 = random_perturbation(kGrid, cfg.s, cfg.delta, rng);

  SimConfig big = cfg;
  big.dt = 0.2;
  big.T = 4.0;
  CHECK_THROWS_AS(evolve(v0, torus, golden(), big), StepTooLarge);
  big.dt = 0.1;  // 1.6 passes etd2 but not etd1
  CHECK_NOTHROW(evolve(v0, torus, golden(), big));
  big.integrator = Integrator::etd1;
  CHECK_THROWS_AS(evolve(v0, torus, golden(), big), StepTooLarge);

  CHECK_THROWS_AS(evolve(2.0 * v0, torus, golden(), cfg), std::invalid_argument);
  SpaceField not_solenoidal = 0.5 * v0;
  not_solenoidal.set_pair(0, A2{1, 0}, 1e-6);
  CHECK_THROWS_AS(evolve(not_solenoidal, torus, golden(), cfg), std::invalid_argument);
  CHECK_THROWS_AS(evolve(SpaceField(GridSpec{1, 2, 2, 3, 2}), torus, golden(), cfg), GridMismatch);

  SimConfig bad = cfg;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.T = 5 * bad.dt;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("BlowUp reports the partial series") {
  // An artificial large-amplitude Kolmogorov shear, far outside the small-forcing regime.
  TorusSolution shear = no_torus();
  shear.U.set_pair(0, A1{0}, A2{0, 2}, Complex(0.0, -200.0));
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.T = 2.0;
  cfg.delta = 1e-3;
  SpaceField v0(kGrid);
  v0.set_pair(1, A2{1, 0}, 1.0);
  v0.set_pair(1, A2{1, 1}, Complex(0.3, 0.1));
  v0.set_pair(0, A2{1, 1}, Complex(-0.3, -0.1));
  v0 *= cfg.delta / space_norm(v0, cfg.s);
  try {
    evolve(v0, shear, golden(), cfg);
    FAIL("expected BlowUp");
  } catch (const BlowUp& e) {
    CHECK(e.partial().blow_up);
    CHECK(e.partial().hs_norms.back() > 10.0 * cfg.delta);
    CHECK(e.partial().times.back() < cfg.T);
  }
}

TEST_CASE("integrator convergence order") {
  const auto torus = small_torus(5e-2);
  Rng rng(9);
  SimConfig cfg;
  cfg.T = 1.0;
  cfg.delta = 0.05;
  cfg.burn_in = 0.0;
  const SpaceField v0 = random_perturbation(kGrid, cfg.s, cfg.delta, rng);
  for (auto which : {Integrator::etd1, Integrator::etd2}) {
    cfg.integrator = which;
    std::vector<double> finals;
    for (double dt : {0.02, 0.01, 0.005}) {
      cfg.dt = dt;
      finals.push_back(evolve(v0, torus, golden(), cfg).hs_norms.back());
    }
    const double ratio = std::abs(finals[0] - finals[1]) / std::abs(finals[1] - finals[2]);
    MESSAGE(to_string(which) << " ratio " << ratio);
    CHECK(ratio == doctest::Approx(which == Integrator::etd1 ? 2.0 : 4.0).epsilon(0.2));
  }
}

TEST_CASE("duhamel_apply examples") {
  Rng rng(10);
  SampledSeries zero;
  for (int i = 0; i <= 10; ++i) {
    zero.times.push_back(0.1 * i);
    zero.values.emplace_back(kGrid);
  }
  CHECK(duhamel_apply(zero, 0.7).is_zero());

  const SpaceField w = zero_mean(kGrid, rng);
  SampledSeries f;
  for (int i = 0; i <= 50; ++i) {
    f.times.push_back(0.04 * i);
    f.values.push_back(heat_propagate(w, f.times.back()));
  }
  const auto traj = duhamel_trajectory(f);
  for (int i : {0, 1, 17, 50}) {
    const double t = f.times[i];
    const SpaceField exact = t * heat_propagate(w, t);
    const SpaceField got = duhamel_apply(f, t);
    CHECK((got - exact).max_abs() <= 1e-8 * (1e-300 + exact.max_abs()));
    CHECK((traj[i] - got).max_abs() <= 1e-13 * (1e-300 + got.max_abs()));
  }
  CHECK(duhamel_apply(f, 0.0).is_zero());
}

TEST_CASE("exponential-linear quadrature converges at second order") {
  Rng rng(11);
  SpaceField g = zero_mean(kGrid, rng);
  const double alpha = 0.9, T = 2.0;
  const SpaceField exact = oracle::forced_duhamel(g, alpha, T);
  std::vector<double> err;
  for (int n : {20, 40, 80}) {
    SampledSeries f;
    for (int i = 0; i <= n; ++i) {
      f.times.push_back(T * i / n);
      f.values.push_back(std::exp(-alpha * f.times.back()) * g);
    }
    err.push_back(space_norm(duhamel_apply(f, T, Quadrature::exponential_linear) - exact, 0));
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(err[2] <= 1e-4 * space_norm(exact, 0));
}

TEST_CASE("duhamel smoothing constant") {
  Rng rng(12);
  SpaceField g = zero_mean(kGrid, rng);
  const double s = 2.5;
  g *= 1.0 / space_norm(g, s - 1.0);
  for (double alpha : {0.5, 0.9}) {
    std::vector<double> sups;
    for (double h : {0.05, 0.025}) {
      SampledSeries f;
      const int n = static_cast<int>(std::lround(10.0 / h));
      for (int i = 0; i <= n; ++i) {
        f.times.push_back(10.0 * i / n);
        f.values.push_back(std::exp(-alpha * f.times.back()) * g);
      }
      const auto traj = duhamel_trajectory(f);
      double sup = 0.0;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        sup = std::max(sup, std::exp(alpha * f.times[i]) * space_norm(traj[i], s));
      }
      sups.push_back(sup);
    }
    MESSAGE("C(" << alpha << ") measured " << sups[1]);
    CHECK(std::isfinite(sups[1]));
    CHECK(sups[0] / sups[1] < 2.0);
    CHECK(sups[1] / sups[0] < 2.0);
  }
}

TEST_CASE("duhamel errors") {
  SampledSeries f;
  CHECK_THROWS_AS(duhamel_apply(f, 1.0), InsufficientSamples);
  f.times = {0.0, 0.5};
  f.values = {SpaceField(kGrid), SpaceField(kGrid)};
  CHECK_THROWS_AS(duhamel_apply(f, 1.0), InsufficientSamples);
  CHECK_THROWS_AS(duhamel_apply(f, -0.1), NegativeTime);
  SampledSeries late = f;
  late.times = {0.1, 1.0};
  CHECK_THROWS_AS(duhamel_apply(late, 0.5), InsufficientSamples);
  SampledSeries unordered = f;
  unordered.times = {0.5, 0.0};
  CHECK_THROWS_AS(duhamel_apply(unordered, 0.2), InsufficientSamples);
  SampledSeries one;
  one.times = {0.0};
  one.values = {SpaceField(kGrid)};
  CHECK_THROWS_AS(duhamel_apply(one, 0.5), InsufficientSamples);
}

TEST_CASE("weighted_norm examples") {
  DecaySeries single;
  single.s = 2.5;
  single.times = {0.0};
  single.hs_norms = {1e-3};
  CHECK(weighted_norm(single, 0.9, 2.5) == 1e-3);

  DecaySeries heat;
  heat.s = 2.5;
  DecaySeries slow = heat;
  const double T = 15.0;
  for (int i = 0; i <= 150; ++i) {
    const double t = T * i / 150;
    heat.times.push_back(t);
    heat.hs_norms.push_back(std::exp(-t));
    slow.times.push_back(t);
    slow.hs_norms.push_back(std::exp(-0.5 * t));
  }
  CHECK(weighted_norm(heat, 0.9, 2.5) == 1.0);
  CHECK(weighted_norm(slow, 0.9, 2.5) == doctest::Approx(std::exp(0.4 * T)).epsilon(1e-13));

  DecaySeries empty;
  CHECK_THROWS_AS(weighted_norm(empty, 0.9, 0.0), EmptySeries);
  CHECK_THROWS_AS(weighted_norm(heat, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("exponential fit") {
  std::vector<double> t, y;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  const auto fit = fit_exponential_decay(t, y, 1.0, 0.0);
  CHECK(fit.valid);
  CHECK(fit.samples == 91);
  CHECK(fit.rate == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  const auto floored = fit_exponential_decay(t, y, 0.0, 1.0);
  CHECK(floored.samples == 16);
  const auto none = fit_exponential_decay(t, y, 0.0, 10.0);
  CHECK_FALSE(none.valid);
}

TEST_CASE("integrator names") {
  CHECK(parse_integrator("etd1") == Integrator::etd1);
  CHECK(parse_integrator("etd2") == Integrator::etd2);
  CHECK_THROWS_AS(parse_integrator("rk4"), std::invalid_argument);
  CHECK(to_string(Integrator::etd2) == "etd2");
}
