#pragma once

#include <random>

#include "qpns/fields.hpp"

namespace qpns {

using Rng = std::mt19937_64;

/// Complex Gaussian coefficients on every mode, conjugate-symmetrized.
SpaceField random_field(const GridSpec& grid, Rng& rng);
SpaceTimeField random_field_spacetime(const GridSpec& grid, Rng& rng);

/// Leray-projected, zero space mean random vector field (ncomp forced to d).
SpaceField random_solenoidal(const GridSpec& grid, Rng& rng);
SpaceTimeField random_solenoidal_spacetime(const GridSpec& grid, Rng& rng);

/// Random divergence-free zero-mean field rescaled to ||v||_{H^s} = delta
/// (zero field when delta == 0).
SpaceField random_perturbation(const GridSpec& grid, double s, double delta, Rng& rng);

}  // namespace qpns
