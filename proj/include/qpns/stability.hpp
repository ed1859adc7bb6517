#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qpns/errors.hpp"
#include "qpns/fields.hpp"
#include "qpns/torus.hpp"

namespace qpns {

enum class Integrator { etd1, etd2 };

/// Which parts of the convective term u_w.grad v + v.grad u_w + v.grad v enter N(v).
enum class ConvectiveTerms { full, linearized, none };

Integrator parse_integrator(const std::string& name);
std::string to_string(Integrator integrator);

struct SimConfig {
  double alpha = 0.9;
  double delta = 1e-3;
  double dt = 1e-3;
  double T = 15.0;
  double s = 2.5;
  Integrator integrator = Integrator::etd2;
  double burn_in = 1.0;
  ConvectiveTerms terms = ConvectiveTerms::full;

  /// Throws std::invalid_argument (dt < 1, T >= 10 dt, 0 < alpha < 1, ...).
  void validate() const;
};

/// Largest admissible dt * Kx^2 for each integrator.
double step_limit(Integrator integrator);

struct ExponentialFit {
  double rate = std::numeric_limits<double>::quiet_NaN();  // -slope of log(y) vs t
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples = 0;
  bool valid = false;
};

/// Least squares of log(values) against times over t >= t_min, skipping values below `floor`.
ExponentialFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values,
                                     double t_min, double floor);

struct DecaySeries {
  double s = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> hs_norms;
  std::vector<double> q_norms;
  double weighted_sup = 0.0;
  double alpha_fit = std::numeric_limits<double>::quiet_NaN();
  double fit_r2 = std::numeric_limits<double>::quiet_NaN();
  bool fit_valid = false;
  double q_alpha_fit = std::numeric_limits<double>::quiet_NaN();
  double q_fit_r2 = std::numeric_limits<double>::quiet_NaN();
  bool q_fit_valid = false;
  /// sup_t ||v(t)||_{H^s} / delta.
  double orbital_constant = 0.0;
  double max_divergence_defect = 0.0;
  double max_mean_defect = 0.0;
  bool blow_up = false;
};

class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, DecaySeries partial) : Error(what), partial_(std::move(partial)) {}
  const DecaySeries& partial() const { return partial_; }

 private:
  DecaySeries partial_;
};

/// e^{t Lap} u0: e^{-t |j|^2} per mode, mean removed. Throws NegativeTime.
SpaceField heat_propagate(const SpaceField& u0, double t);

/// max_{y >= 0} y^n e^{-zeta y} = (n / zeta)^n e^{-n}.
double appendix_max(int n, double zeta);

/// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2, accurate near 0.
double etd_phi1(double z);
double etd_phi2(double z);

/// u_w.grad v + v.grad u_w + v.grad v (restricted per `terms`).
SpaceField convective_terms(const SpaceField& v, const SpaceField& u_omega, ConvectiveTerms terms = ConvectiveTerms::full);

/// N(v) = -L(u_w.grad v + v.grad u_w + v.grad v).
SpaceField perturbation_rhs(const SpaceField& v, const SpaceField& u_omega,
                            ConvectiveTerms terms = ConvectiveTerms::full);

/// q = (-Lap)^{-1} div(u_w.grad v + v.grad u_w + v.grad v).
SpaceField recover_pressure_q(const SpaceField& v, const SpaceField& u_omega);

/// Exponential time differencing of the perturbation equation around the torus.
/// Throws BlowUp (with the partial series) or StepTooLarge.
DecaySeries evolve(const SpaceField& v0, const TorusSolution& torus, const FrequencySpec& freq,
                   const SimConfig& cfg);

/// Samples f(tau_k) of a time-dependent field, tau strictly increasing.
struct SampledSeries {
  std::vector<double> times;
  std::vector<SpaceField> values;
};

enum class Quadrature {
  trapezoid,           // trapezoid rule on e^{(t-tau)Lap} f(tau)
  exponential_linear,  // f linear per interval, integrated exactly against the heat factor
};

/// int_0^t e^{(t - tau) Lap} f(tau) dtau, heat factor exact per mode. f is
/// linearly interpolated at t when t is not a sample time. Throws InsufficientSamples.
SpaceField duhamel_apply(const SampledSeries& f, double t, Quadrature quadrature = Quadrature::trapezoid);

/// duhamel_apply at every sample time, by the one-step recursion.
std::vector<SpaceField> duhamel_trajectory(const SampledSeries& f, Quadrature quadrature = Quadrature::trapezoid);

/// max over samples of e^{alpha t} ||v(t)||_{H^s}. Throws EmptySeries; s must match the series.
double weighted_norm(const DecaySeries& series, double alpha, double s);

}  // namespace qpns
