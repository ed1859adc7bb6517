#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpns/errors.hpp"
#include "qpns/fields.hpp"

namespace qpns {

/// Angle modes with |omega . l| below this are treated as resonant.
inline constexpr double kGammaFloor = 1e-10;

struct DiophantineCertificate {
  double gamma_est = 0.0;
  bool ok = false;
};

/// gamma_est = min over 0 < |l|_inf <= Lcheck of |omega . l| |l|^nu. This only
/// certifies the condition up to the cutoff.
DiophantineCertificate certify_diophantine(std::span<const double> omega, int Lcheck);

/// Frequency vector plus its certificate. `gamma` is min(1, gamma_est) when
/// certified and 0 otherwise.
struct FrequencySpec {
  std::vector<double> omega;
  double gamma = 0.0;
  double gamma_est = 0.0;
  int Lcheck = 0;
  bool certified = false;

  static FrequencySpec certify(std::vector<double> omega, int Lcheck);
  int nu() const { return static_cast<int>(omega.size()); }
  double dot(std::span<const int> l) const;
};

struct ForcingSpec {
  SpaceTimeField fhat;  // ncomp == d
  double epsilon = 0.0;
  bool zero_space_mean = false;

  /// Checks the mean conditions and reality; throws std::invalid_argument.
  void validate() const;
};

struct SolverConfig {
  SobolevIndex idx;
  double tol_residual = 1e-12;
  int max_iter = 50;
  bool contraction_probe = false;
  int probe_pairs = 50;
  std::uint64_t probe_seed = 1;

  /// sigma = nu/2 + 2, s = d/2 + 1.5.
  static SolverConfig defaults_for(const GridSpec& grid);
  void validate() const;
};

struct ContractionProbe {
  double radius = 0.0;
  int pairs = 0;
  double lipschitz_max = 0.0;
  double lipschitz_mean = 0.0;
};

struct TorusSolution {
  SpaceTimeField U;  // velocity, ncomp == d
  SpaceTimeField P;  // pressure, scalar
  int iterations = 0;
  bool converged = false;
  /// ||U_{k+1} - U_k||_{sigma,s} for every Picard step.
  std::vector<double> residual_history;
  /// ||omega.d_phi U - Lap U + L(U.grad U) - eps L f||_{sigma,s-2}.
  double pde_residual = 0.0;
  /// Same with the unprojected nonlinearity and grad P.
  double momentum_residual = 0.0;
  /// ||Phi(U_perp) - U_perp||_{sigma,s} at the returned iterate.
  double fixed_point_defect = 0.0;
  double norm_U = 0.0;
  double norm_P = 0.0;
  /// sup_k ||U_k||_{sigma,s} / eps (0 when eps == 0).
  double c_star = 0.0;
  double gamma_est = 0.0;
  std::optional<ContractionProbe> probe;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, TorusSolution diagnostics)
      : Error(what), diagnostics_(std::move(diagnostics)) {}
  const TorusSolution& diagnostics() const { return diagnostics_; }

 private:
  TorusSolution diagnostics_;
};

/// (omega . d_phi)^{-1} on the j = 0 slice: U0(l) = rhs(l, 0) / (i omega . l).
/// Throws ResonantMode if a mode with |omega . l| < kGammaFloor carries data,
/// NonZeroMean if rhs(0, 0) != 0.
SpaceTimeField solve_averaged(const SpaceTimeField& rhs, const FrequencySpec& freq);

/// L_omega^{-1} g with symbol (i omega . l + |j|^2), j != 0.
/// Throws NonZeroSpaceMean if g has j = 0 content.
SpaceTimeField invert_L_omega(const SpaceTimeField& g, const FrequencySpec& freq);

/// L_omega U on every mode (j = 0 included).
SpaceTimeField apply_L_omega(const SpaceTimeField& U, const FrequencySpec& freq);

/// Phi(U) = L_omega^{-1} pi0perp L(eps f - W . grad U) with W = U + mean_flow.
/// `mean_flow` is the x-constant part U0(phi) of the torus (zero if null).
SpaceTimeField phi_map(const SpaceTimeField& U, const ForcingSpec& forcing, const FrequencySpec& freq,
                       const SpaceTimeField* mean_flow = nullptr);

/// P = (-Lap)^{-1} div(U . grad U - eps f), zero space mean.
SpaceTimeField recover_pressure(const SpaceTimeField& U, const ForcingSpec& forcing);

double projected_residual(const SpaceTimeField& U, const ForcingSpec& forcing, const FrequencySpec& freq,
                          SobolevIndex idx);
double momentum_residual(const SpaceTimeField& U, const SpaceTimeField& P, const ForcingSpec& forcing,
                         const FrequencySpec& freq, SobolevIndex idx);

/// Empirical Lipschitz factor of Phi over random pairs of solenoidal
/// zero-mean fields with ||U_i||_{sigma,s} <= radius.
ContractionProbe probe_contraction(const ForcingSpec& forcing, const FrequencySpec& freq,
                                   const SpaceTimeField& mean_flow, SobolevIndex idx, double radius, int pairs,
                                   std::uint64_t seed);

/// Picard iteration U <- Phi(U) from U = 0, assembled with the averaged part.
/// Throws NoConvergence (carrying the diagnostics) or ResonantMode.
TorusSolution solve_torus(const ForcingSpec& forcing, const FrequencySpec& freq, const SolverConfig& cfg);

}  // namespace qpns
