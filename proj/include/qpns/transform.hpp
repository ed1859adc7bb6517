#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qpns/grid.hpp"

namespace qpns {

/// Collocation transform between a truncated coefficient cube prod_i [-K_i, K_i]
/// (row-major, same layout as the fields) and a uniform physical grid of
/// 3 K_i + 1 points per dimension, which is alias-free for quadratic products
/// on the retained band. Backed by FFTW complex transforms.
class PseudoSpectralTransform {
 public:
  explicit PseudoSpectralTransform(std::vector<int> cutoffs);
  ~PseudoSpectralTransform();
  PseudoSpectralTransform(const PseudoSpectralTransform&) = delete;
  PseudoSpectralTransform& operator=(const PseudoSpectralTransform&) = delete;

  const std::vector<int>& cutoffs() const { return cutoffs_; }
  const std::vector<int>& physical_shape() const { return shape_; }
  std::size_t coefficient_size() const { return scatter_.size(); }
  std::size_t physical_size() const { return physical_size_; }

  /// values(x_n) = sum_k c_k exp(i k . x_n); imaginary round-off is dropped.
  void to_physical(std::span<const Complex> coeffs, std::span<double> values);

  /// Inverse of to_physical restricted to the retained band. The result is
  /// made exactly conjugate-symmetric.
  void to_spectral(std::span<const double> values, std::span<Complex> coeffs);

 private:
  struct Plans;

  std::vector<int> cutoffs_;
  std::vector<int> shape_;
  std::size_t physical_size_ = 0;
  std::vector<std::size_t> scatter_;
  std::unique_ptr<Plans> plans_;
};

/// Per-thread cached transform for the given cutoffs.
PseudoSpectralTransform& transform_for(const std::vector<int>& cutoffs);

}  // namespace qpns
