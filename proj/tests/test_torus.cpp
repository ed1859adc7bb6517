#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "qpns/random_fields.hpp"
#include "qpns/spectral.hpp"
#include "qpns/torus.hpp"

using namespace qpns;
using A1 = std::array<int, 1>;
using A2 = std::array<int, 2>;

namespace {

const GridSpec kGrid{1, 2, 2, 4, 2};

// Several interacting modes so that U.grad U does not vanish.
ForcingSpec multi_mode_forcing(double eps, bool with_space_mean = false) {
  ForcingSpec f{SpaceTimeField(kGrid), eps, !with_space_mean};
  f.fhat.set_pair(1, A1{1}, A2{1, 0}, 0.5);
  f.fhat.set_pair(0, A1{0}, A2{0, 1}, Complex(0.0, -0.5));
  f.fhat.set_pair(0, A1{1}, A2{1, 2}, Complex(0.3, 0.2));
  f.fhat.set_pair(1, A1{-1}, A2{2, -1}, Complex(-0.1, 0.4));
  if (with_space_mean) f.fhat.set_pair(0, A1{1}, A2{0, 0}, 0.25);
  return f;
}

FrequencySpec golden() { return FrequencySpec::certify({std::numbers::phi}, 50); }

}  // namespace

TEST_CASE("certify_diophantine examples") {
  const std::vector<double> one{1.0};
  const auto c1 = certify_diophantine(one, 50);
  CHECK(c1.ok);
  CHECK(c1.gamma_est == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> phi{std::numbers::phi};
  const auto c2 = certify_diophantine(phi, 50);
  CHECK(c2.ok);
  CHECK(c2.gamma_est > 0.38);
  CHECK(c2.gamma_est == doctest::Approx(oracle::gamma_brute(phi, 50)).epsilon(1e-13));
  // With nu = 1 the minimum sits at l = +-1.
  CHECK(c2.gamma_est == doctest::Approx(std::numbers::phi).epsilon(1e-15));

  const std::vector<double> flat{1.0, 1.0};
  CHECK_FALSE(certify_diophantine(flat, 10).ok);

  const std::vector<double> two{std::sqrt(2.0), std::sqrt(3.0)};
  const auto c3 = certify_diophantine(two, 12);
  CHECK(c3.gamma_est == doctest::Approx(oracle::gamma_brute({std::sqrt(2.0), std::sqrt(3.0)}, 12)).epsilon(1e-13));

  CHECK_THROWS_AS(certify_diophantine(std::vector<double>{}, 5), std::invalid_argument);
  CHECK_THROWS_AS(certify_diophantine(one, 0), std::invalid_argument);
}

TEST_CASE("frequency gamma is capped at one") {
  const auto f = FrequencySpec::certify({std::sqrt(2.0)}, 50);
  CHECK(f.gamma_est == doctest::Approx(std::sqrt(2.0)));
  CHECK(f.gamma == 1.0);
  const auto r = FrequencySpec::certify({1.0, 1.0}, 5);
  CHECK_FALSE(r.certified);
  CHECK(r.gamma == 0.0);
}

TEST_CASE("forcing validation") {
  ForcingSpec f = multi_mode_forcing(1e-3);
  CHECK_NOTHROW(f.validate());
  ForcingSpec bad_mean = f;
  bad_mean.fhat.set_pair(0, A1{0}, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(bad_mean.validate(), std::invalid_argument);
  ForcingSpec bad_space = f;
  bad_space.fhat.set_pair(1, A1{1}, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(bad_space.validate(), std::invalid_argument);
  ForcingSpec bad_eps = f;
  bad_eps.epsilon = 1.0;
  CHECK_THROWS_AS(bad_eps.validate(), std::invalid_argument);
}

TEST_CASE("solver defaults") {
  const auto c = SolverConfig::defaults_for(GridSpec{2, 3, 1, 2, 3});
  CHECK(c.idx.sigma == 3.0);
  CHECK(c.idx.s == 3.0);
  const auto d = SolverConfig::defaults_for(kGrid);
  CHECK(d.idx.sigma == 2.5);
  CHECK(d.idx.s == 2.5);
}

TEST_CASE("solve_averaged examples") {
  const auto freq = FrequencySpec::certify({2.0}, 10);
  SpaceTimeField zero(kGrid);
  CHECK(solve_averaged(zero, freq).is_zero());

  SpaceTimeField rhs(kGrid);
  const Complex c(0.6, -0.3);
  rhs.set_pair(0, A1{1}, A2{0, 0}, c);
  const SpaceTimeField U0 = solve_averaged(rhs, freq);
  CHECK(std::abs(U0.at(0, A1{1}, A2{0, 0}) - c / Complex(0.0, 2.0)) <= 1e-15);
  CHECK(U0.reality_defect() == 0.0);

  SpaceTimeField mean(kGrid);
  mean.set_pair(1, A1{0}, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(solve_averaged(mean, freq), NonZeroMean);

  const GridSpec g2{2, 2, 1, 2, 2};
  const auto flat = FrequencySpec::certify({1.0, 1.0}, 5);
  SpaceTimeField res(g2);
  std::array<int, 2> l{1, -1};
  res.set_pair(0, l, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(solve_averaged(res, flat), ResonantMode);
}

TEST_CASE("zero space mean forcing gives U0 = 0") {
  ForcingSpec f = multi_mode_forcing(1e-2);
  const auto sol = solve_torus(f, golden(), SolverConfig::defaults_for(kGrid));
  CHECK(space_mean_magnitude(sol.U) == 0.0);
}

TEST_CASE("invert_L_omega examples") {
  const auto freq = FrequencySpec::certify({1.0}, 10);
  SpaceTimeField g(kGrid);
  const Complex c(0.2, 0.9);
  g.set_pair(1, A1{1}, A2{1, 0}, c);
  const SpaceTimeField out = invert_L_omega(g, freq);
  CHECK(std::abs(out.at(1, A1{1}, A2{1, 0}) - c / Complex(1.0, 1.0)) <= 1e-15);

  SpaceTimeField m(kGrid);
  m.set_pair(0, A1{1}, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(invert_L_omega(m, freq), NonZeroSpaceMean);
}

TEST_CASE("property: gain of two, round trip, divergence") {
  oracle::Gen gen(808);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec g = gen.grid(3, 4);
    std::vector<double> omega(g.nu);
    for (auto& o : omega) o = gen.real(0.3, 3.0);
    const auto freq = FrequencySpec::certify(omega, 5);
    Rng rng(trial);
    const SpaceTimeField gfield = mean_projections(random_field_spacetime(g, rng)).fluctuation;
    const SobolevIndex idx{gen.real(0, 3), gen.real(0, 3)};
    const SpaceTimeField inv = invert_L_omega(gfield, freq);
    // equality holds exactly when Kphi = 0, so allow rounding
    if (mixed_norm(inv, {idx.sigma, idx.s + 2}) > (1.0 + 1e-12) * mixed_norm(gfield, idx)) ++violations;
    CHECK((apply_L_omega(inv, freq) - gfield).max_abs() <= 1e-12 * gfield.max_abs());

    const SpaceTimeField sol = random_solenoidal_spacetime(g, rng);
    CHECK(divergence_defect(invert_L_omega(sol, freq)) <= 1e-13 * sol.max_abs());
  }
  CHECK(violations == 0);
}

TEST_CASE("phi_map examples") {
  const auto freq = golden();
  ForcingSpec f = multi_mode_forcing(2e-3);
  const SpaceTimeField zero(kGrid);
  const SpaceTimeField linear =
      invert_L_omega(mean_projections(leray_project(f.epsilon * f.fhat)).fluctuation, freq);
  CHECK((phi_map(zero, f, freq) - linear).max_abs() <= 1e-18);

  ForcingSpec none = f;
  none.epsilon = 0.0;
  CHECK(phi_map(zero, none, freq).is_zero());

  SpaceTimeField with_mean(kGrid);
  with_mean.set_pair(0, A1{1}, A2{0, 0}, 1.0);
  CHECK_THROWS_AS(phi_map(with_mean, f, freq), NonZeroSpaceMean);
}

TEST_CASE("solve_torus with epsilon = 0") {
  ForcingSpec f = multi_mode_forcing(0.0);
  const auto sol = solve_torus(f, golden(), SolverConfig::defaults_for(kGrid));
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.U.is_zero());
  CHECK(sol.P.is_zero());
  CHECK(sol.norm_U == 0.0);
}

TEST_CASE("first Picard iterate has residual O(eps^2)") {
  const auto freq = golden();
  const auto cfg = SolverConfig::defaults_for(kGrid);
  std::vector<double> res;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    ForcingSpec f = multi_mode_forcing(eps);
    const SpaceTimeField first = phi_map(SpaceTimeField(kGrid), f, freq);
    res.push_back(projected_residual(first, f, freq, cfg.idx));
  }
  CHECK(res[0] > 0.0);
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.02));
  CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("converged ||U|| / eps stays bounded as eps halves") {
  const auto freq = golden();
  const auto cfg = SolverConfig::defaults_for(kGrid);
  std::vector<double> ratio;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    const auto sol = solve_torus(multi_mode_forcing(eps, true), freq, cfg);
    CHECK(sol.converged);
    ratio.push_back(sol.norm_U / eps);
    MESSAGE("eps = " << eps << ": ||U||/eps = " << ratio.back() << ", iterations = " << sol.iterations);
  }
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  CHECK(*hi / *lo - 1.0 < 0.05);
}

TEST_CASE("converged torus: certificate, invariants, momentum residual") {
  const auto freq = golden();
  auto cfg = SolverConfig::defaults_for(kGrid);
  const ForcingSpec f = multi_mode_forcing(1e-2, true);
  const auto sol = solve_torus(f, freq, cfg);
  REQUIRE(sol.converged);
  CHECK(sol.iterations > 2);
  CHECK(sol.fixed_point_defect <= 2.0 * cfg.tol_residual * std::max(1.0, sol.norm_U));
  CHECK(divergence_defect(sol.U) <= 1e-12);
  CHECK(std::abs(sol.U(0, sol.U.num_modes() / 2)) <= tol_mean(sol.U));
  CHECK(std::abs(sol.U(1, sol.U.num_modes() / 2)) <= tol_mean(sol.U));
  CHECK(space_mean_magnitude(sol.U) > 0.0);
  CHECK(space_mean_magnitude(sol.P) <= tol_mean(sol.P));
  CHECK(sol.pde_residual <= 10.0 * cfg.tol_residual);
  CHECK(sol.momentum_residual <= 10.0 * cfg.tol_residual);
  CHECK(sol.U.reality_defect() <= 1e-15);
  // successive differences shrink
  for (std::size_t k = 2; k < sol.residual_history.size(); ++k) {
    CHECK(sol.residual_history[k] < sol.residual_history[k - 1]);
  }
}

TEST_CASE("resonant frequencies with zero space mean forcing still converge") {
  const GridSpec g{2, 2, 1, 3, 2};
  ForcingSpec f{SpaceTimeField(g), 1e-2, true};
  std::array<int, 2> l{1, -1}, l2{1, 0};
  f.fhat.set_pair(1, l, A2{1, 0}, 0.5);
  f.fhat.set_pair(0, l2, A2{1, 1}, Complex(0.2, 0.3));
  f.fhat.set_pair(1, l2, A2{1, 1}, Complex(-0.2, -0.3));
  const auto freq = FrequencySpec::certify({1.0, 1.0}, 5);
  CHECK_FALSE(freq.certified);
  const auto sol = solve_torus(f, freq, SolverConfig::defaults_for(g));
  CHECK(sol.converged);

  ForcingSpec mean = f;
  mean.zero_space_mean = false;
  mean.fhat.set_pair(0, l, A2{0, 0}, 0.25);
  CHECK_THROWS_AS(solve_torus(mean, freq, SolverConfig::defaults_for(g)), ResonantMode);
}

TEST_CASE("NoConvergence carries diagnostics") {
  auto cfg = SolverConfig::defaults_for(kGrid);
  cfg.max_iter = 2;
  try {
    solve_torus(multi_mode_forcing(5e-2), golden(), cfg);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.diagnostics().iterations == 2);
    CHECK(e.diagnostics().residual_history.size() == 2);
    CHECK_FALSE(e.diagnostics().converged);
  }
}

TEST_CASE("recover_pressure examples") {
  ForcingSpec none{SpaceTimeField(kGrid), 0.0, true};
  CHECK(recover_pressure(SpaceTimeField(kGrid), none).is_zero());

  // f = grad of a single mode: P = -eps (-Lap)^{-1} div f
  ForcingSpec f{SpaceTimeField(kGrid), 3e-3, true};
  const A2 j{1, 2};
  const Complex a(0.4, -0.1);
  f.fhat.set_pair(0, A1{1}, j, Complex(0.0, 1.0) * a);
  f.fhat.set_pair(1, A1{1}, j, Complex(0.0, 2.0) * a);
  const SpaceTimeField P = recover_pressure(SpaceTimeField(kGrid), f);
  const Complex div = Complex(0.0, 1.0) * (1.0 * f.fhat.at(0, A1{1}, j) + 2.0 * f.fhat.at(1, A1{1}, j));
  CHECK(std::abs(P.at(0, A1{1}, j) - (-f.epsilon * div / 5.0)) <= 1e-18);
  CHECK(std::abs(P.at(0, A1{1}, j) - f.epsilon * a) <= 1e-18);
}

TEST_CASE("empirical contraction") {
  const auto freq = golden();
  auto cfg = SolverConfig::defaults_for(kGrid);
  cfg.contraction_probe = true;
  cfg.probe_pairs = 20;
  const auto a = solve_torus(multi_mode_forcing(1e-2), freq, cfg);
  const auto b = solve_torus(multi_mode_forcing(5e-3), freq, cfg);
  REQUIRE(a.probe);
  REQUIRE(b.probe);
  MESSAGE("Lipschitz max: " << a.probe->lipschitz_max << " at eps 1e-2, " << b.probe->lipschitz_max << " at 5e-3");
  CHECK(a.probe->lipschitz_max < 1.0);
  CHECK(b.probe->lipschitz_max / a.probe->lipschitz_max == doctest::Approx(0.5).epsilon(0.05));
  CHECK(a.probe->lipschitz_mean <= a.probe->lipschitz_max);
}
