#include "qpns/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qpns {

void GridSpec::validate() const {
  if (nu < 1) throw std::invalid_argument("grid: nu must be >= 1");
  if (d < 2) throw std::invalid_argument("grid: d must be >= 2");
  if (Kphi < 0) throw std::invalid_argument("grid: Kphi must be >= 0");
  if (Kx < 1) throw std::invalid_argument("grid: Kx must be >= 1");
  if (ncomp < 1) throw std::invalid_argument("grid: ncomp must be >= 1");
}

std::size_t GridSpec::space_modes() const { return Lattice(d, Kx).size(); }
std::size_t GridSpec::angle_modes() const { return Lattice(nu, Kphi).size(); }

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "nu=" << nu << " d=" << d << " Kphi=" << Kphi << " Kx=" << Kx << " ncomp=" << ncomp;
  return os.str();
}

void SobolevIndex::validate() const {
  if (!(std::isfinite(sigma) && sigma >= 0.0) || !(std::isfinite(s) && s >= 0.0)) {
    throw std::invalid_argument("sobolev index: sigma and s must be finite and >= 0");
  }
}

Lattice::Lattice(int dims, int cutoff) : dims_(dims), cutoff_(cutoff), size_(1) {
  if (dims < 1 || cutoff < 0) throw std::invalid_argument("lattice: bad shape");
  for (int i = 0; i < dims; ++i) size_ *= static_cast<std::size_t>(side());
}

bool Lattice::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dims_) return false;
  for (int v : k) {
    if (v < -cutoff_ || v > cutoff_) return false;
  }
  return true;
}

std::size_t Lattice::index(std::span<const int> k) const {
  if (!contains(k)) throw std::out_of_range("lattice: mode outside truncation");
  std::size_t idx = 0;
  for (int v : k) idx = idx * side() + static_cast<std::size_t>(v + cutoff_);
  return idx;
}

void Lattice::unravel(std::size_t idx, std::span<int> k) const {
  for (int i = dims_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(idx % side()) - cutoff_;
    idx /= side();
  }
}

std::vector<int> Lattice::unravel(std::size_t idx) const {
  std::vector<int> k(dims_);
  unravel(idx, k);
  return k;
}

std::vector<double> space_wavenumber_sq(const GridSpec& grid) {
  const Lattice lat(grid.d, grid.Kx);
  std::vector<double> out(lat.size());
  std::vector<int> j(grid.d);
  for (std::size_t m = 0; m < lat.size(); ++m) {
    lat.unravel(m, j);
    double sq = 0.0;
    for (int v : j) sq += static_cast<double>(v) * v;
    out[m] = sq;
  }
  return out;
}

std::vector<int> space_wavevectors(const GridSpec& grid) {
  const Lattice lat(grid.d, grid.Kx);
  std::vector<int> out(lat.size() * grid.d);
  for (std::size_t m = 0; m < lat.size(); ++m) {
    lat.unravel(m, std::span<int>(out.data() + m * grid.d, grid.d));
  }
  return out;
}

std::vector<int> angle_wavevectors(const GridSpec& grid) {
  const Lattice lat(grid.nu, grid.Kphi);
  std::vector<int> out(lat.size() * grid.nu);
  for (std::size_t m = 0; m < lat.size(); ++m) {
    lat.unravel(m, std::span<int>(out.data() + m * grid.nu, grid.nu));
  }
  return out;
}

double japanese_bracket(double euclidean_norm) { return euclidean_norm > 1.0 ? euclidean_norm : 1.0; }

}  // namespace qpns
