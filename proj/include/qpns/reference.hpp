#pragma once

#include "qpns/fields.hpp"

namespace qpns {

/// Direct Fourier convolution sum_{p + q = k} (u(p) . i q) v(q), truncated to
/// the grid. Cost is quadratic in the number of modes; meant for small grids.
SpaceField reference_advect(const SpaceField& u, const SpaceField& v);
SpaceTimeField reference_advect(const SpaceTimeField& U, const SpaceTimeField& V);

}  // namespace qpns
