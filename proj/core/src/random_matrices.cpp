#include "qmmw/random_matrices.hpp"

#include <cmath>

#include "qmmw/errors.hpp"

namespace qmmw {

HermitianMatrix random_hermitian(Rng& rng, std::size_t d) {
  ComplexMatrix m(d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      const Complex z(re * inv_sqrt2, im * inv_sqrt2);
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix::hermitian_part(m);
}

DensityMatrix random_density(Rng& rng, std::size_t d, std::size_t rank) {
  if (d == 0) throw DimensionError("random_density: dimension must be positive");
  if (rank == 0 || rank > d) rank = d;
  std::vector<Complex> g(d * rank);
  for (auto& z : g) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  ComplexMatrix m(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Complex sum{};
      for (std::size_t k = 0; k < rank; ++k) sum += g[i * rank + k] * std::conj(g[j * rank + k]);
      m(i, j) = sum;
    }
    total += m(i, i).real();
  }
  m *= 1.0 / total;
  return DensityMatrix(HermitianMatrix::hermitian_part(m));
}

DensityMatrix random_density_mixed_rank(Rng& rng, std::size_t d) {
  return random_density(rng, d, 1 + rng.index(d));
}

}  // namespace qmmw
