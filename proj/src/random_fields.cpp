#include "qpns/random_fields.hpp"

#include "qpns/spectral.hpp"

namespace qpns {

namespace {

template <class Field>
void fill_gaussian(Field& f, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = f.num_modes();
  for (int c = 0; c < f.ncomp(); ++c) {
    for (std::size_t m = 0; m <= n / 2; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      const std::size_t mm = f.mirror(m);
      if (m == mm) {
        f(c, m) = Complex(re, 0.0);
      } else {
        f(c, m) = Complex(re, im);
        f(c, mm) = Complex(re, -im);
      }
    }
  }
}

}  // namespace

SpaceField random_field(const GridSpec& grid, Rng& rng) {
  SpaceField f(grid);
  fill_gaussian(f, rng);
  return f;
}

SpaceTimeField random_field_spacetime(const GridSpec& grid, Rng& rng) {
  SpaceTimeField f(grid);
  fill_gaussian(f, rng);
  return f;
}

SpaceField random_solenoidal(const GridSpec& grid, Rng& rng) {
  return remove_mean(leray_project(random_field(grid.with_ncomp(grid.d), rng)));
}

SpaceTimeField random_solenoidal_spacetime(const GridSpec& grid, Rng& rng) {
  return mean_projections(leray_project(random_field_spacetime(grid.with_ncomp(grid.d), rng))).fluctuation;
}

SpaceField random_perturbation(const GridSpec& grid, double s, double delta, Rng& rng) {
  SpaceField v = random_solenoidal(grid, rng);
  if (delta == 0.0) return SpaceField(v.grid());
  const double n = space_norm(v, s);
  return v * (delta / n);
}

}  // namespace qpns
