#include "qpns/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qpns/errors.hpp"
#include "qpns/transform.hpp"

namespace qpns {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_vector_field(const GridSpec& g, const char* op) {
  if (g.ncomp != g.d) {
    throw GridMismatch(std::string(op) + ": expected ncomp == d, got " + g.describe());
  }
}

void require_scalar_field(const GridSpec& g, const char* op) {
  if (g.ncomp != 1) throw GridMismatch(std::string(op) + ": expected a scalar field");
}

void require_same_lattice(const GridSpec& a, const GridSpec& b) {
  if (!a.same_lattice(b)) detail::throw_grid_mismatch(a, b);
}

std::vector<double> space_weights(const GridSpec& g, double s) {
  auto w = space_wavenumber_sq(g);
  for (double& v : w) v = std::pow(japanese_bracket(std::sqrt(v)), 2.0 * s);
  return w;
}

std::vector<double> angle_weights(const GridSpec& g, double sigma) {
  const Lattice lat(g.nu, g.Kphi);
  const auto ls = angle_wavevectors(g);
  std::vector<double> w(lat.size());
  for (std::size_t a = 0; a < lat.size(); ++a) {
    double sq = 0.0;
    for (int i = 0; i < g.nu; ++i) sq += static_cast<double>(ls[a * g.nu + i]) * ls[a * g.nu + i];
    w[a] = std::pow(japanese_bracket(std::sqrt(sq)), 2.0 * sigma);
  }
  return w;
}

// Leray on a single mode, in place. `j` has d entries.
void leray_mode(std::span<const int> j, double jsq, Complex* u, std::size_t stride) {
  if (jsq == 0.0) return;
  const int d = static_cast<int>(j.size());
  Complex dot{};
  for (int m = 0; m < d; ++m) dot += static_cast<double>(j[m]) * u[m * stride];
  const Complex f = dot / jsq;
  for (int m = 0; m < d; ++m) u[m * stride] -= static_cast<double>(j[m]) * f;
}

std::vector<int> cutoffs_space(const GridSpec& g) { return std::vector<int>(g.d, g.Kx); }

std::vector<int> cutoffs_spacetime(const GridSpec& g) {
  std::vector<int> c(g.nu, g.Kphi);
  c.insert(c.end(), g.d, g.Kx);
  return c;
}

// Shared kernel of both advect overloads. `space_of(mode)` maps a coefficient
// index to its space index (for the j-derivative).
template <class Field, class SpaceOf>
Field advect_impl(const Field& u, const Field& v, const std::vector<int>& cutoffs, SpaceOf space_of) {
  const GridSpec& g = u.grid();
  const int d = g.d;
  const auto js = space_wavevectors(g);
  auto& tr = transform_for(cutoffs);
  const std::size_t np = tr.physical_size();
  const std::size_t nm = u.num_modes();

  std::vector<std::vector<double>> u_phys(d, std::vector<double>(np));
  for (int m = 0; m < d; ++m) tr.to_physical(u.component(m), u_phys[m]);

  Field out(v.grid());
  std::vector<Complex> deriv(nm);
  std::vector<double> deriv_phys(np);
  std::vector<double> acc(np);
  for (int c = 0; c < v.ncomp(); ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto vc = v.component(c);
    for (int m = 0; m < d; ++m) {
      bool any = false;
      for (std::size_t k = 0; k < nm; ++k) {
        const int jm = js[space_of(k) * d + m];
        deriv[k] = kI * static_cast<double>(jm) * vc[k];
        any = any || deriv[k] != Complex{};
      }
      if (!any) continue;
      tr.to_physical(deriv, deriv_phys);
      const auto& um = u_phys[m];
      for (std::size_t p = 0; p < np; ++p) acc[p] += um[p] * deriv_phys[p];
    }
    tr.to_spectral(acc, out.component(c));
  }
  return out;
}

}  // namespace

double space_norm(const SpaceField& u, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("space_norm: s must be >= 0");
  const auto w = space_weights(u.grid(), s);
  double sum = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) {
    const auto uc = u.component(c);
    for (std::size_t m = 0; m < uc.size(); ++m) sum += w[m] * std::norm(uc[m]);
  }
  return std::sqrt(sum);
}

double mixed_norm(const SpaceTimeField& U, SobolevIndex idx) {
  idx.validate();
  const auto ws = space_weights(U.grid(), idx.s);
  const auto wa = angle_weights(U.grid(), idx.sigma);
  const std::size_t xm = U.space_modes();
  double sum = 0.0;
  for (int c = 0; c < U.ncomp(); ++c) {
    const auto uc = U.component(c);
    for (std::size_t a = 0; a < U.angle_modes(); ++a) {
      for (std::size_t m = 0; m < xm; ++m) sum += wa[a] * ws[m] * std::norm(uc[a * xm + m]);
    }
  }
  return std::sqrt(sum);
}

double inner_product(const SpaceField& a, const SpaceField& b) {
  if (!(a.grid() == b.grid())) detail::throw_grid_mismatch(a.grid(), b.grid());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) sum += (std::conj(a.data()[i]) * b.data()[i]).real();
  return sum;
}

double tol_mean(const SpaceField& u) { return 1e-12 * (1.0 + space_norm(u, 0.0)); }
double tol_mean(const SpaceTimeField& U) { return 1e-12 * (1.0 + mixed_norm(U, {0.0, 0.0})); }

MeanSplit mean_projections(const SpaceTimeField& U) {
  MeanSplit out{SpaceTimeField(U.grid()), U};
  const std::size_t z = U.zero_space_mode();
  for (int c = 0; c < U.ncomp(); ++c) {
    for (std::size_t a = 0; a < U.angle_modes(); ++a) {
      const std::size_t k = U.mode_index(a, z);
      out.mean(c, k) = U(c, k);
      out.fluctuation(c, k) = Complex{};
    }
  }
  return out;
}

SpaceField leray_project(const SpaceField& u) {
  require_vector_field(u.grid(), "leray_project");
  SpaceField out = u;
  const auto js = space_wavevectors(u.grid());
  const auto jsq = space_wavenumber_sq(u.grid());
  const int d = u.grid().d;
  for (std::size_t m = 0; m < u.num_modes(); ++m) {
    leray_mode(std::span<const int>(js.data() + m * d, d), jsq[m], &out(0, m), u.num_modes());
  }
  return out;
}

SpaceTimeField leray_project(const SpaceTimeField& U) {
  require_vector_field(U.grid(), "leray_project");
  SpaceTimeField out = U;
  const auto js = space_wavevectors(U.grid());
  const auto jsq = space_wavenumber_sq(U.grid());
  const int d = U.grid().d;
  const std::size_t xm = U.space_modes();
  for (std::size_t a = 0; a < U.angle_modes(); ++a) {
    for (std::size_t m = 0; m < xm; ++m) {
      leray_mode(std::span<const int>(js.data() + m * d, d), jsq[m], &out(0, a * xm + m), U.num_modes());
    }
  }
  return out;
}

SpaceField divergence(const SpaceField& u) {
  require_vector_field(u.grid(), "divergence");
  SpaceField out(u.grid().with_ncomp(1));
  const auto js = space_wavevectors(u.grid());
  const int d = u.grid().d;
  for (std::size_t m = 0; m < u.num_modes(); ++m) {
    Complex acc{};
    for (int c = 0; c < d; ++c) acc += static_cast<double>(js[m * d + c]) * u(c, m);
    out(0, m) = kI * acc;
  }
  return out;
}

SpaceTimeField divergence(const SpaceTimeField& U) {
  require_vector_field(U.grid(), "divergence");
  SpaceTimeField out(U.grid().with_ncomp(1));
  const auto js = space_wavevectors(U.grid());
  const int d = U.grid().d;
  const std::size_t xm = U.space_modes();
  for (std::size_t k = 0; k < U.num_modes(); ++k) {
    const std::size_t m = k % xm;
    Complex acc{};
    for (int c = 0; c < d; ++c) acc += static_cast<double>(js[m * d + c]) * U(c, k);
    out(0, k) = kI * acc;
  }
  return out;
}

SpaceField gradient(const SpaceField& g) {
  require_scalar_field(g.grid(), "gradient");
  const int d = g.grid().d;
  SpaceField out(g.grid().with_ncomp(d));
  const auto js = space_wavevectors(g.grid());
  for (std::size_t m = 0; m < g.num_modes(); ++m) {
    for (int c = 0; c < d; ++c) out(c, m) = kI * static_cast<double>(js[m * d + c]) * g(0, m);
  }
  return out;
}

SpaceTimeField gradient(const SpaceTimeField& g) {
  require_scalar_field(g.grid(), "gradient");
  const int d = g.grid().d;
  SpaceTimeField out(g.grid().with_ncomp(d));
  const auto js = space_wavevectors(g.grid());
  const std::size_t xm = g.space_modes();
  for (std::size_t k = 0; k < g.num_modes(); ++k) {
    const std::size_t m = k % xm;
    for (int c = 0; c < d; ++c) out(c, k) = kI * static_cast<double>(js[m * d + c]) * g(0, k);
  }
  return out;
}

SpaceField inverse_laplacian(const SpaceField& g) {
  require_scalar_field(g.grid(), "inverse_laplacian");
  const double mean = std::abs(g(0, g.zero_mode()));
  if (mean > tol_mean(g)) {
    throw NonZeroMean("inverse_laplacian: |mean| = " + std::to_string(mean) + " exceeds tolerance");
  }
  const auto jsq = space_wavenumber_sq(g.grid());
  SpaceField out(g.grid());
  for (std::size_t m = 0; m < g.num_modes(); ++m) {
    if (jsq[m] != 0.0) out(0, m) = g(0, m) / jsq[m];
  }
  return out;
}

SpaceTimeField inverse_laplacian(const SpaceTimeField& g) {
  require_scalar_field(g.grid(), "inverse_laplacian");
  const double tol = tol_mean(g);
  if (space_mean_magnitude(g) > tol) {
    throw NonZeroSpaceMean("inverse_laplacian: field has a nonzero space mean");
  }
  const auto jsq = space_wavenumber_sq(g.grid());
  const std::size_t xm = g.space_modes();
  SpaceTimeField out(g.grid());
  for (std::size_t k = 0; k < g.num_modes(); ++k) {
    const double q = jsq[k % xm];
    if (q != 0.0) out(0, k) = g(0, k) / q;
  }
  return out;
}

SpaceField apply_radial_multiplier(const SpaceField& u, const std::function<double(double)>& mult) {
  const auto jsq = space_wavenumber_sq(u.grid());
  SpaceField out = u;
  for (int c = 0; c < u.ncomp(); ++c) {
    auto oc = out.component(c);
    for (std::size_t m = 0; m < oc.size(); ++m) oc[m] *= mult(jsq[m]);
  }
  return out;
}

SpaceTimeField apply_radial_multiplier(const SpaceTimeField& U, const std::function<double(double)>& mult) {
  const auto jsq = space_wavenumber_sq(U.grid());
  std::vector<double> factor(jsq.size());
  for (std::size_t m = 0; m < jsq.size(); ++m) factor[m] = mult(jsq[m]);
  const std::size_t xm = U.space_modes();
  SpaceTimeField out = U;
  for (int c = 0; c < U.ncomp(); ++c) {
    auto oc = out.component(c);
    for (std::size_t k = 0; k < oc.size(); ++k) oc[k] *= factor[k % xm];
  }
  return out;
}

SpaceField apply_fourier_multiplier(const SpaceField& u,
                                    const std::function<Complex(std::span<const int>)>& mult) {
  const auto js = space_wavevectors(u.grid());
  const int d = u.grid().d;
  SpaceField out = u;
  for (std::size_t m = 0; m < u.num_modes(); ++m) {
    const Complex f = mult(std::span<const int>(js.data() + m * d, d));
    for (int c = 0; c < u.ncomp(); ++c) out(c, m) *= f;
  }
  return out;
}

SpaceField advect(const SpaceField& u, const SpaceField& v) {
  require_same_lattice(u.grid(), v.grid());
  require_vector_field(u.grid(), "advect");
  return advect_impl(u, v, cutoffs_space(u.grid()), [](std::size_t k) { return k; });
}

SpaceTimeField advect(const SpaceTimeField& U, const SpaceTimeField& V) {
  require_same_lattice(U.grid(), V.grid());
  require_vector_field(U.grid(), "advect");
  const std::size_t xm = U.space_modes();
  return advect_impl(U, V, cutoffs_spacetime(U.grid()), [xm](std::size_t k) { return k % xm; });
}

SpaceField sample_torus(const SpaceTimeField& U, std::span<const double> omega, double t) {
  const GridSpec& g = U.grid();
  if (static_cast<int>(omega.size()) != g.nu) {
    throw GridMismatch("sample_torus: omega has " + std::to_string(omega.size()) + " entries, grid nu = " +
                       std::to_string(g.nu));
  }
  const auto ls = angle_wavevectors(g);
  const std::size_t na = U.angle_modes();
  std::vector<Complex> phase(na);
  for (std::size_t a = 0; a < na; ++a) {
    double wl = 0.0;
    for (int i = 0; i < g.nu; ++i) wl += omega[i] * ls[a * g.nu + i];
    phase[a] = std::polar(1.0, wl * t);
  }
  SpaceField out(g);
  const std::size_t xm = U.space_modes();
  for (int c = 0; c < U.ncomp(); ++c) {
    const auto uc = U.component(c);
    auto oc = out.component(c);
    for (std::size_t a = 0; a < na; ++a) {
      const Complex p = phase[a];
      for (std::size_t m = 0; m < xm; ++m) oc[m] += uc[a * xm + m] * p;
    }
  }
  out.enforce_reality();
  return out;
}

double divergence_defect(const SpaceField& u) {
  require_vector_field(u.grid(), "divergence_defect");
  return divergence(u).max_abs();
}

double divergence_defect(const SpaceTimeField& U) {
  require_vector_field(U.grid(), "divergence_defect");
  return divergence(U).max_abs();
}

double mean_magnitude(const SpaceField& u) {
  double sq = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) sq += std::norm(u(c, u.zero_mode()));
  return std::sqrt(sq);
}

double space_mean_magnitude(const SpaceTimeField& U) {
  double worst = 0.0;
  const std::size_t z = U.zero_space_mode();
  for (std::size_t a = 0; a < U.angle_modes(); ++a) {
    double sq = 0.0;
    for (int c = 0; c < U.ncomp(); ++c) sq += std::norm(U(c, U.mode_index(a, z)));
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

SpaceField remove_mean(SpaceField u) {
  for (int c = 0; c < u.ncomp(); ++c) u(c, u.zero_mode()) = Complex{};
  return u;
}

}  // namespace qpns
