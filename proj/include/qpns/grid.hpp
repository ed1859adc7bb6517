#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qpns {

using Complex = std::complex<double>;

/// Rectangular truncation of Z^nu x Z^d: angle modes with |l|_inf <= Kphi and
/// space modes with |j|_inf <= Kx, for fields with `ncomp` components.
struct GridSpec {
  int nu = 1;
  int d = 2;
  int Kphi = 0;
  int Kx = 1;
  int ncomp = 1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  GridSpec with_ncomp(int n) const {
    GridSpec g = *this;
    g.ncomp = n;
    return g;
  }

  /// Same lattice, possibly a different number of components.
  bool same_lattice(const GridSpec& other) const {
    return nu == other.nu && d == other.d && Kphi == other.Kphi && Kx == other.Kx;
  }

  std::size_t space_modes() const;
  std::size_t angle_modes() const;

  std::string describe() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Sobolev regularity pair: sigma in the angles, s in space.
struct SobolevIndex {
  double sigma = 0.0;
  double s = 0.0;
  void validate() const;
};

/// Row-major enumeration of the cube [-K, K]^dims. The flat index of -k is
/// size() - 1 - index(k), which is what the conjugate-symmetry code relies on.
class Lattice {
 public:
  Lattice(int dims, int cutoff);

  int dims() const { return dims_; }
  int cutoff() const { return cutoff_; }
  int side() const { return 2 * cutoff_ + 1; }
  std::size_t size() const { return size_; }

  bool contains(std::span<const int> k) const;
  std::size_t index(std::span<const int> k) const;
  void unravel(std::size_t idx, std::span<int> k) const;
  std::vector<int> unravel(std::size_t idx) const;
  std::size_t mirror(std::size_t idx) const { return size_ - 1 - idx; }

 private:
  int dims_;
  int cutoff_;
  std::size_t size_;
};

/// Per-mode |j|^2 for every space mode of the grid, in lattice order.
std::vector<double> space_wavenumber_sq(const GridSpec& grid);

/// Flattened wave vectors (space_modes() x d) in lattice order.
std::vector<int> space_wavevectors(const GridSpec& grid);

/// Flattened angle multi-indices (angle_modes() x nu) in lattice order.
std::vector<int> angle_wavevectors(const GridSpec& grid);

/// <xi> = max(1, |xi|).
double japanese_bracket(double euclidean_norm);

}  // namespace qpns
