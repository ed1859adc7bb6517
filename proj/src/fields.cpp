#include "qpns/fields.hpp"

#include "qpns/errors.hpp"

namespace qpns {

namespace detail {

void throw_grid_mismatch(const GridSpec& a, const GridSpec& b) {
  throw GridMismatch("grid mismatch: [" + a.describe() + "] vs [" + b.describe() + "]");
}

}  // namespace detail

SpaceField::SpaceField(const GridSpec& grid)
    : FieldStorage(grid, Lattice(grid.d, grid.Kx).size()), lattice_(grid.d, grid.Kx) {
  grid.validate();
}

void SpaceField::set_pair(int comp, std::span<const int> j, Complex c) {
  const std::size_t m = mode_index(j);
  if (m == mirror(m)) {
    (*this)(comp, m) = Complex(c.real(), 0.0);
    return;
  }
  (*this)(comp, m) = c;
  (*this)(comp, mirror(m)) = std::conj(c);
}

SpaceTimeField::SpaceTimeField(const GridSpec& grid)
    : FieldStorage(grid, Lattice(grid.nu, grid.Kphi).size() * Lattice(grid.d, grid.Kx).size()),
      angle_lattice_(grid.nu, grid.Kphi),
      space_lattice_(grid.d, grid.Kx) {
  grid.validate();
}

void SpaceTimeField::set_pair(int comp, std::span<const int> l, std::span<const int> j, Complex c) {
  const std::size_t m = mode_index(l, j);
  if (m == mirror(m)) {
    (*this)(comp, m) = Complex(c.real(), 0.0);
    return;
  }
  (*this)(comp, m) = c;
  (*this)(comp, mirror(m)) = std::conj(c);
}

}  // namespace qpns
