#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qpns/grid.hpp"

namespace qpns {

namespace detail {

/// Dense component-major coefficient storage shared by both field kinds:
/// data[c * num_modes + m]. Mode m and mirror(m) hold conjugate coefficients.
template <class Derived>
class FieldStorage {
 public:
  const GridSpec& grid() const { return grid_; }
  int ncomp() const { return grid_.ncomp; }
  std::size_t num_modes() const { return num_modes_; }
  std::size_t mirror(std::size_t mode) const { return num_modes_ - 1 - mode; }

  Complex& operator()(int comp, std::size_t mode) { return data_[comp * num_modes_ + mode]; }
  const Complex& operator()(int comp, std::size_t mode) const {
    return data_[comp * num_modes_ + mode];
  }

  std::span<Complex> component(int comp) {
    return {data_.data() + comp * num_modes_, num_modes_};
  }
  std::span<const Complex> component(int comp) const {
    return {data_.data() + comp * num_modes_, num_modes_};
  }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  /// Largest |c(-k) - conj(c(k))| over stored modes.
  double reality_defect() const {
    double worst = 0.0;
    for (int c = 0; c < ncomp(); ++c) {
      for (std::size_t m = 0; m < num_modes_; ++m) {
        const double e = std::abs((*this)(c, mirror(m)) - std::conj((*this)(c, m)));
        if (e > worst) worst = e;
      }
    }
    return worst;
  }

  /// Replaces every pair by its conjugate-symmetric average.
  void enforce_reality() {
    for (int c = 0; c < ncomp(); ++c) {
      for (std::size_t m = 0; m < num_modes_ / 2 + 1; ++m) {
        const std::size_t mm = mirror(m);
        const Complex avg = 0.5 * ((*this)(c, m) + std::conj((*this)(c, mm)));
        (*this)(c, m) = avg;
        (*this)(c, mm) = std::conj(avg);
      }
    }
  }

  bool is_zero() const {
    for (const auto& z : data_) {
      if (z != Complex{}) return false;
    }
    return true;
  }

  double max_abs() const {
    double worst = 0.0;
    for (const auto& z : data_) worst = std::max(worst, std::abs(z));
    return worst;
  }

  Derived& operator+=(const Derived& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return self();
  }
  Derived& operator-=(const Derived& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return self();
  }
  Derived& operator*=(double a) {
    for (auto& z : data_) z *= a;
    return self();
  }

  friend Derived operator+(Derived a, const Derived& b) { return a += b; }
  friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
  friend Derived operator*(double a, Derived b) { return b *= a; }
  friend Derived operator*(Derived b, double a) { return b *= a; }

 protected:
  FieldStorage() = default;
  FieldStorage(GridSpec grid, std::size_t num_modes)
      : grid_(grid), num_modes_(num_modes), data_(grid.ncomp * num_modes) {}

  void check_same(const Derived& o) const;

  GridSpec grid_{};
  std::size_t num_modes_ = 0;
  std::vector<Complex> data_;

 private:
  Derived& self() { return static_cast<Derived&>(*this); }
};

void throw_grid_mismatch(const GridSpec& a, const GridSpec& b);

template <class Derived>
void FieldStorage<Derived>::check_same(const Derived& o) const {
  if (!(grid_ == o.grid_)) throw_grid_mismatch(grid_, o.grid_);
}

}  // namespace detail

/// Truncated Fourier coefficients of a real field on T^d: j -> C^ncomp, |j|_inf <= Kx.
class SpaceField : public detail::FieldStorage<SpaceField> {
 public:
  SpaceField() = default;
  explicit SpaceField(const GridSpec& grid);

  const Lattice& lattice() const { return lattice_; }

  std::size_t mode_index(std::span<const int> j) const { return lattice_.index(j); }
  Complex& at(int comp, std::span<const int> j) { return (*this)(comp, mode_index(j)); }
  Complex at(int comp, std::span<const int> j) const { return (*this)(comp, mode_index(j)); }

  /// Sets coeff(j) = c and coeff(-j) = conj(c). At j = 0 only the real part is kept.
  void set_pair(int comp, std::span<const int> j, Complex c);

  std::size_t zero_mode() const { return num_modes_ / 2; }

 private:
  Lattice lattice_{2, 0};
};

/// Truncated Fourier coefficients of a real field on T^nu x T^d:
/// (l, j) -> C^ncomp, flattened as angle_index * space_modes + space_index.
class SpaceTimeField : public detail::FieldStorage<SpaceTimeField> {
 public:
  SpaceTimeField() = default;
  explicit SpaceTimeField(const GridSpec& grid);

  const Lattice& angle_lattice() const { return angle_lattice_; }
  const Lattice& space_lattice() const { return space_lattice_; }
  std::size_t space_modes() const { return space_lattice_.size(); }
  std::size_t angle_modes() const { return angle_lattice_.size(); }

  std::size_t mode_index(std::span<const int> l, std::span<const int> j) const {
    return angle_lattice_.index(l) * space_lattice_.size() + space_lattice_.index(j);
  }
  std::size_t mode_index(std::size_t angle, std::size_t space) const {
    return angle * space_lattice_.size() + space;
  }
  Complex& at(int comp, std::span<const int> l, std::span<const int> j) {
    return (*this)(comp, mode_index(l, j));
  }
  Complex at(int comp, std::span<const int> l, std::span<const int> j) const {
    return (*this)(comp, mode_index(l, j));
  }

  /// Sets coeff(l, j) = c and coeff(-l, -j) = conj(c).
  void set_pair(int comp, std::span<const int> l, std::span<const int> j, Complex c);

  std::size_t zero_space_mode() const { return space_lattice_.size() / 2; }

 private:
  Lattice angle_lattice_{1, 0};
  Lattice space_lattice_{2, 0};
};

}  // namespace qpns
