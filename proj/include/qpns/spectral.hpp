#pragma once

#include <functional>
#include <span>

#include "qpns/errors.hpp"
#include "qpns/fields.hpp"

namespace qpns {

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// (sum_j <j>^{2s} |u(j)|^2)^{1/2} with <j> = max(1, |j|).
double space_norm(const SpaceField& u, double s);

/// (sum_{l,j} <l>^{2 sigma} <j>^{2s} |U(l,j)|^2)^{1/2}.
double mixed_norm(const SpaceTimeField& U, SobolevIndex idx);

/// Plancherel inner product Re sum_j conj(a(j)) . b(j).
double inner_product(const SpaceField& a, const SpaceField& b);

/// Scale-aware zero-mean tolerance 1e-12 (1 + ||u||_{H^0}).
double tol_mean(const SpaceField& u);
double tol_mean(const SpaceTimeField& U);

// ---------------------------------------------------------------------------
// Projections and differential operators
// ---------------------------------------------------------------------------

struct MeanSplit {
  SpaceTimeField mean;         // j = 0 modes only
  SpaceTimeField fluctuation;  // j = 0 modes zeroed
};

MeanSplit mean_projections(const SpaceTimeField& U);

/// Orthogonal projector onto divergence-free fields: (I - j j^T / |j|^2) per
/// mode, j = 0 passed through. Requires ncomp == d.
SpaceField leray_project(const SpaceField& u);
SpaceTimeField leray_project(const SpaceTimeField& U);

/// i j . u(j); scalar output. Requires ncomp == d.
SpaceField divergence(const SpaceField& u);
SpaceTimeField divergence(const SpaceTimeField& U);

/// i j g(j) for scalar g; output has d components.
SpaceField gradient(const SpaceField& g);
SpaceTimeField gradient(const SpaceTimeField& g);

/// g(j) / |j|^2 for j != 0; throws NonZeroMean if |g(0)| > tol_mean(g).
SpaceField inverse_laplacian(const SpaceField& g);
/// Slice-wise in l; throws NonZeroSpaceMean if some |g(l, 0)| exceeds tol_mean(g).
SpaceTimeField inverse_laplacian(const SpaceTimeField& g);

/// Multiplies every mode by m(|j|^2) (a radial Fourier multiplier in space).
SpaceField apply_radial_multiplier(const SpaceField& u, const std::function<double(double)>& m);
SpaceTimeField apply_radial_multiplier(const SpaceTimeField& U, const std::function<double(double)>& m);

/// Multiplies every mode j by m(j).
SpaceField apply_fourier_multiplier(const SpaceField& u,
                                    const std::function<Complex(std::span<const int>)>& m);

// ---------------------------------------------------------------------------
// Pseudo-spectral advection
// ---------------------------------------------------------------------------

/// Truncated (u . grad) v, componentwise in v, via a 3K+1 collocation grid.
/// Requires ncomp(u) == d and matching lattices.
SpaceField advect(const SpaceField& u, const SpaceField& v);

/// Same, jointly pseudo-spectral in (phi, x); derivatives are in x only.
SpaceTimeField advect(const SpaceTimeField& U, const SpaceTimeField& V);

/// u_omega(t)(j) = sum_l U(l, j) exp(i (omega . l) t).
SpaceField sample_torus(const SpaceTimeField& U, std::span<const double> omega, double t);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// max_{j != 0} |j . u(j)| over all modes (and all l for space-time fields).
double divergence_defect(const SpaceField& u);
double divergence_defect(const SpaceTimeField& U);

/// Euclidean norm in C^ncomp of the j = 0 coefficient (max over l for space-time fields).
double mean_magnitude(const SpaceField& u);
double space_mean_magnitude(const SpaceTimeField& U);

/// Removes the j = 0 coefficient.
SpaceField remove_mean(SpaceField u);

}  // namespace qpns
