#include "qpns/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace qpns {

namespace {

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct PseudoSpectralTransform::Plans {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PseudoSpectralTransform::PseudoSpectralTransform(std::vector<int> cutoffs)
    : cutoffs_(std::move(cutoffs)), plans_(std::make_unique<Plans>()) {
  if (cutoffs_.empty()) throw std::invalid_argument("transform: no dimensions");
  physical_size_ = 1;
  std::size_t coeff_size = 1;
  for (int k : cutoffs_) {
    if (k < 0) throw std::invalid_argument("transform: negative cutoff");
    shape_.push_back(3 * k + 1);
    physical_size_ *= static_cast<std::size_t>(3 * k + 1);
    coeff_size *= static_cast<std::size_t>(2 * k + 1);
  }

  // Coefficient index -> wrapped physical index.
  scatter_.resize(coeff_size);
  const int rank = static_cast<int>(cutoffs_.size());
  std::vector<int> k(rank);
  for (std::size_t c = 0; c < coeff_size; ++c) {
    std::size_t rem = c;
    for (int i = rank - 1; i >= 0; --i) {
      const int side = 2 * cutoffs_[i] + 1;
      k[i] = static_cast<int>(rem % side) - cutoffs_[i];
      rem /= side;
    }
    std::size_t p = 0;
    for (int i = 0; i < rank; ++i) {
      const int wrapped = k[i] >= 0 ? k[i] : k[i] + shape_[i];
      p = p * shape_[i] + static_cast<std::size_t>(wrapped);
    }
    scatter_[c] = p;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->buffer = fftw_alloc_complex(physical_size_);
  plans_->forward = fftw_plan_dft(rank, shape_.data(), plans_->buffer, plans_->buffer,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft(rank, shape_.data(), plans_->buffer, plans_->buffer,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("transform: FFTW planning failed");
}

PseudoSpectralTransform::~PseudoSpectralTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
  if (plans_->buffer) fftw_free(plans_->buffer);
}

void PseudoSpectralTransform::to_physical(std::span<const Complex> coeffs, std::span<double> values) {
  if (coeffs.size() != scatter_.size() || values.size() != physical_size_) {
    throw std::invalid_argument("transform: size mismatch in to_physical");
  }
  fftw_complex* buf = plans_->buffer;
  for (std::size_t p = 0; p < physical_size_; ++p) {
    buf[p][0] = 0.0;
    buf[p][1] = 0.0;
  }
  for (std::size_t c = 0; c < scatter_.size(); ++c) {
    buf[scatter_[c]][0] = coeffs[c].real();
    buf[scatter_[c]][1] = coeffs[c].imag();
  }
  fftw_execute(plans_->backward);
  for (std::size_t p = 0; p < physical_size_; ++p) values[p] = buf[p][0];
}

void PseudoSpectralTransform::to_spectral(std::span<const double> values, std::span<Complex> coeffs) {
  if (coeffs.size() != scatter_.size() || values.size() != physical_size_) {
    throw std::invalid_argument("transform: size mismatch in to_spectral");
  }
  fftw_complex* buf = plans_->buffer;
  for (std::size_t p = 0; p < physical_size_; ++p) {
    buf[p][0] = values[p];
    buf[p][1] = 0.0;
  }
  fftw_execute(plans_->forward);
  const double scale = 1.0 / static_cast<double>(physical_size_);
  for (std::size_t c = 0; c < scatter_.size(); ++c) {
    coeffs[c] = Complex(buf[scatter_[c]][0], buf[scatter_[c]][1]) * scale;
  }
  const std::size_t n = coeffs.size();
  for (std::size_t c = 0; c < n / 2 + 1; ++c) {
    const std::size_t mirror = n - 1 - c;
    const Complex avg = 0.5 * (coeffs[c] + std::conj(coeffs[mirror]));
    coeffs[c] = avg;
    coeffs[mirror] = std::conj(avg);
  }
}

PseudoSpectralTransform& transform_for(const std::vector<int>& cutoffs) {
  thread_local std::map<std::vector<int>, std::unique_ptr<PseudoSpectralTransform>> cache;
  auto it = cache.find(cutoffs);
  if (it == cache.end()) {
    it = cache.emplace(cutoffs, std::make_unique<PseudoSpectralTransform>(cutoffs)).first;
  }
  return *it->second;
}

}  // namespace qpns
