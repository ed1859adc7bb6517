#include "qpns/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qpns/spectral.hpp"

namespace qpns {

Integrator parse_integrator(const std::string& name) {
  if (name == "etd1") return Integrator::etd1;
  if (name == "etd2") return Integrator::etd2;
  throw std::invalid_argument("unknown integrator '" + name + "' (expected etd1 or etd2)");
}

std::string to_string(Integrator integrator) { return integrator == Integrator::etd1 ? "etd1" : "etd2"; }

void SimConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sim: alpha must lie in (0, 1)");
  if (!(delta >= 0.0)) throw std::invalid_argument("sim: delta must be >= 0");
  if (!(dt > 0.0 && dt < 1.0)) throw std::invalid_argument("sim: dt must lie in (0, 1)");
  if (!(T >= 10.0 * dt)) throw std::invalid_argument("sim: T must be >= 10 dt");
  if (!(s >= 0.0)) throw std::invalid_argument("sim: s must be >= 0");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("sim: burn_in must be >= 0");
}

double step_limit(Integrator integrator) { return integrator == Integrator::etd1 ? 1.0 : 2.0; }

ExponentialFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values,
                                     double t_min, double floor) {
  ExponentialFit fit;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min || !(values[i] > floor)) continue;
    const double y = std::log(values[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
    ++n;
  }
  fit.samples = n;
  if (n < 2) return fit;
  const double nd = static_cast<double>(n);
  const double tbar = st / nd;
  const double ybar = sy / nd;
  const double sxx = stt - nd * tbar * tbar;
  if (!(sxx > 0.0)) return fit;
  const double slope = (sty - nd * tbar * ybar) / sxx;
  const double intercept = ybar - slope * tbar;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min || !(values[i] > floor)) continue;
    const double y = std::log(values[i]);
    const double e = y - (intercept + slope * times[i]);
    ss_res += e * e;
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.rate = -slope;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.valid = true;
  return fit;
}

SpaceField heat_propagate(const SpaceField& u0, double t) {
  if (t < 0.0) throw NegativeTime("heat_propagate: t must be >= 0");
  return apply_radial_multiplier(u0, [t](double q) { return q == 0.0 ? 0.0 : std::exp(-t * q); });
}

double appendix_max(int n, double zeta) {
  if (n < 1) throw std::invalid_argument("appendix_max: n must be >= 1");
  if (!(zeta > 0.0)) throw std::invalid_argument("appendix_max: zeta must be > 0");
  return std::pow(n / zeta, n) * std::exp(-static_cast<double>(n));
}

double etd_phi1(double z) {
  if (std::abs(z) < 0.5) {
    // sum_k z^k / (k+1)!
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= z / (k + 1);
      sum += term;
    }
    return sum;
  }
  return std::expm1(z) / z;
}

double etd_phi2(double z) {
  if (std::abs(z) < 0.5) {
    // sum_k z^k / (k+2)!
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= z / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

SpaceField convective_terms(const SpaceField& v, const SpaceField& u_omega, ConvectiveTerms terms) {
  switch (terms) {
    case ConvectiveTerms::none:
      return SpaceField(v.grid());
    case ConvectiveTerms::linearized:
      if (u_omega.is_zero()) return SpaceField(v.grid());
      return advect(u_omega, v) + advect(v, u_omega);
    case ConvectiveTerms::full:
      break;
  }
  if (u_omega.is_zero()) return advect(v, v);
  // u.grad v + v.grad v = (u + v).grad v
  return advect(u_omega + v, v) + advect(v, u_omega);
}

SpaceField perturbation_rhs(const SpaceField& v, const SpaceField& u_omega, ConvectiveTerms terms) {
  return -1.0 * leray_project(convective_terms(v, u_omega, terms));
}

SpaceField recover_pressure_q(const SpaceField& v, const SpaceField& u_omega) {
  return inverse_laplacian(divergence(convective_terms(v, u_omega, ConvectiveTerms::full)));
}

DecaySeries evolve(const SpaceField& v0, const TorusSolution& torus, const FrequencySpec& freq,
                   const SimConfig& cfg) {
  cfg.validate();
  const GridSpec& g = torus.U.grid();
  if (!(v0.grid() == g)) detail::throw_grid_mismatch(v0.grid(), g);
  if (freq.nu() != g.nu) throw GridMismatch("evolve: frequency dimension does not match the torus grid");

  const double limit = step_limit(cfg.integrator);
  if (cfg.dt * g.Kx * g.Kx > limit) {
    throw StepTooLarge("evolve: dt * Kx^2 = " + std::to_string(cfg.dt * g.Kx * g.Kx) + " exceeds " +
                       std::to_string(limit) + " for " + to_string(cfg.integrator));
  }
  const double v0_norm = space_norm(v0, cfg.s);
  if (v0_norm > cfg.delta * (1.0 + 1e-9)) throw std::invalid_argument("evolve: ||v0||_{H^s} exceeds delta");
  if (divergence_defect(v0) > 1e-10 * (1.0 + v0.max_abs())) {
    throw std::invalid_argument("evolve: v0 is not divergence-free");
  }
  if (mean_magnitude(v0) > tol_mean(v0)) throw std::invalid_argument("evolve: v0 has nonzero mean");

  const long steps = static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9));
  const double h = cfg.T / static_cast<double>(steps);

  const auto jsq = space_wavenumber_sq(g);
  std::vector<double> decay(jsq.size()), w1(jsq.size()), w2(jsq.size());
  for (std::size_t m = 0; m < jsq.size(); ++m) {
    const double z = -h * jsq[m];
    decay[m] = std::exp(z);
    w1[m] = h * etd_phi1(z);
    w2[m] = h * etd_phi2(z);
  }
  auto linear_step = [&](const SpaceField& v, const SpaceField& n) {
    SpaceField out(g);
    for (int c = 0; c < g.ncomp; ++c) {
      const auto vc = v.component(c);
      const auto nc = n.component(c);
      auto oc = out.component(c);
      for (std::size_t m = 0; m < oc.size(); ++m) oc[m] = decay[m] * vc[m] + w1[m] * nc[m];
    }
    return out;
  };

  DecaySeries series;
  series.s = cfg.s;
  series.alpha = cfg.alpha;
  series.delta = cfg.delta;
  const double blow_up_at = 10.0 * cfg.delta;
  const bool need_torus = !torus.U.is_zero();

  auto sample = [&](double t) { return need_torus ? sample_torus(torus.U, freq.omega, t) : SpaceField(g); };

  auto finish = [&](DecaySeries& s) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      s.weighted_sup = std::max(s.weighted_sup, std::exp(cfg.alpha * s.times[i]) * s.hs_norms[i]);
      s.orbital_constant = std::max(s.orbital_constant, s.hs_norms[i]);
    }
    s.orbital_constant = cfg.delta > 0.0 ? s.orbital_constant / cfg.delta : 0.0;
    const double floor = 1e-13 * cfg.delta;
    const auto fit = fit_exponential_decay(s.times, s.hs_norms, cfg.burn_in, floor);
    s.alpha_fit = fit.rate;
    s.fit_r2 = fit.r2;
    s.fit_valid = fit.valid;
    const auto qfit = fit_exponential_decay(s.times, s.q_norms, cfg.burn_in, floor);
    s.q_alpha_fit = qfit.rate;
    s.q_fit_r2 = qfit.r2;
    s.q_fit_valid = qfit.valid;
  };

  auto record = [&](double t, const SpaceField& v, const SpaceField& conv) {
    const double hs = space_norm(v, cfg.s);
    series.times.push_back(t);
    series.hs_norms.push_back(hs);
    series.q_norms.push_back(space_norm(inverse_laplacian(divergence(conv)), cfg.s));
    series.max_divergence_defect = std::max(series.max_divergence_defect, divergence_defect(v));
    series.max_mean_defect = std::max(series.max_mean_defect, mean_magnitude(v));
    if (!(hs <= blow_up_at)) {
      series.blow_up = true;
      finish(series);
      throw BlowUp("evolve: ||v(t)||_{H^s} = " + std::to_string(hs) + " exceeds 10 delta at t = " +
                       std::to_string(t),
                   series);
    }
  };

  SpaceField v = v0;
  for (long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;
    const SpaceField conv = convective_terms(v, sample(t), cfg.terms);
    record(t, v, conv);
    const SpaceField n0 = -1.0 * leray_project(conv);
    SpaceField a = linear_step(v, n0);
    if (cfg.integrator == Integrator::etd2) {
      const SpaceField n1 = perturbation_rhs(a, sample(t + h), cfg.terms);
      for (int c = 0; c < g.ncomp; ++c) {
        auto ac = a.component(c);
        const auto n0c = n0.component(c);
        const auto n1c = n1.component(c);
        for (std::size_t m = 0; m < ac.size(); ++m) ac[m] += w2[m] * (n1c[m] - n0c[m]);
      }
    }
    v = std::move(a);
  }
  record(cfg.T, v, convective_terms(v, sample(cfg.T), cfg.terms));
  finish(series);
  return series;
}

namespace {

void check_series(const SampledSeries& f) {
  if (f.times.empty() || f.times.size() != f.values.size()) {
    throw InsufficientSamples("duhamel: empty series or times/values size mismatch");
  }
  for (std::size_t i = 1; i < f.times.size(); ++i) {
    if (!(f.times[i] > f.times[i - 1])) throw InsufficientSamples("duhamel: sample times must increase strictly");
  }
}

SpaceField interpolate(const SampledSeries& f, double tau) {
  const auto it = std::lower_bound(f.times.begin(), f.times.end(), tau);
  if (it == f.times.end()) return f.values.back();
  const std::size_t k = static_cast<std::size_t>(it - f.times.begin());
  if (*it == tau || k == 0) return f.values[k];
  const double a = f.times[k - 1], b = f.times[k];
  const double w = (tau - a) / (b - a);
  return (1.0 - w) * f.values[k - 1] + w * f.values[k];
}

// Integral over one interval of length h, evaluated at its right end.
SpaceField interval_contribution(const SpaceField& fa, const SpaceField& fb, double h, Quadrature quad) {
  const auto jsq = space_wavenumber_sq(fa.grid());
  SpaceField out(fa.grid());
  for (int c = 0; c < fa.ncomp(); ++c) {
    const auto ac = fa.component(c);
    const auto bc = fb.component(c);
    auto oc = out.component(c);
    for (std::size_t m = 0; m < oc.size(); ++m) {
      const double z = -h * jsq[m];
      if (quad == Quadrature::trapezoid) {
        oc[m] = 0.5 * h * (std::exp(z) * ac[m] + bc[m]);
      } else {
        const double p1 = etd_phi1(z), p2 = etd_phi2(z);
        oc[m] = h * ((p1 - p2) * ac[m] + p2 * bc[m]);
      }
    }
  }
  return out;
}

SpaceField propagate_keep_mean(const SpaceField& u, double t) {
  return apply_radial_multiplier(u, [t](double q) { return std::exp(-t * q); });
}

}  // namespace

SpaceField duhamel_apply(const SampledSeries& f, double t, Quadrature quadrature) {
  check_series(f);
  if (t < 0.0) throw NegativeTime("duhamel_apply: t must be >= 0");
  const double slack = 1e-12 * std::max(1.0, t);
  if (f.times.front() > slack || f.times.back() < t - slack) {
    throw InsufficientSamples("duhamel_apply: samples do not cover [0, t]");
  }
  SpaceField out(f.values.front().grid());
  if (t == 0.0) return out;
  if (f.times.size() < 2) throw InsufficientSamples("duhamel_apply: need at least two samples");

  std::vector<double> nodes{0.0};
  for (double tau : f.times) {
    if (tau > slack && tau < t - slack) nodes.push_back(tau);
  }
  nodes.push_back(t);

  SpaceField fa = interpolate(f, 0.0);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const SpaceField fb = interpolate(f, nodes[k]);
    out += propagate_keep_mean(interval_contribution(fa, fb, nodes[k] - nodes[k - 1], quadrature), t - nodes[k]);
    fa = fb;
  }
  return out;
}

std::vector<SpaceField> duhamel_trajectory(const SampledSeries& f, Quadrature quadrature) {
  check_series(f);
  if (std::abs(f.times.front()) > 1e-12) throw InsufficientSamples("duhamel_trajectory: series must start at 0");
  std::vector<SpaceField> out;
  out.reserve(f.times.size());
  out.emplace_back(f.values.front().grid());
  for (std::size_t k = 1; k < f.times.size(); ++k) {
    const double h = f.times[k] - f.times[k - 1];
    out.push_back(propagate_keep_mean(out.back(), h) +
                  interval_contribution(f.values[k - 1], f.values[k], h, quadrature));
  }
  return out;
}

double weighted_norm(const DecaySeries& series, double alpha, double s) {
  if (series.times.empty()) throw EmptySeries("weighted_norm: empty series");
  if (s != series.s) throw std::invalid_argument("weighted_norm: series was recorded at a different s");
  double best = 0.0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    best = std::max(best, std::exp(alpha * series.times[i]) * series.hs_norms[i]);
  }
  return best;
}

}  // namespace qpns
