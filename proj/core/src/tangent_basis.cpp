#include "qmmw/tangent_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmmw/errors.hpp"

namespace qmmw {

BasisSet build_basis(std::size_t d) {
  if (d == 0) throw DimensionError("build_basis: dimension must be positive");
  BasisSet basis;
  basis.dim = d;
  basis.elements.reserve(d * d - 1);

  for (std::size_t j = 1; j < d; ++j) {
    const double jd = static_cast<double>(j);
    const double norm = std::sqrt(jd * (jd + 1.0));
    ComplexMatrix m(d);
    for (std::size_t k = 0; k < j; ++k) m(k, k) = 1.0 / norm;
    m(j, j) = -jd / norm;
    basis.elements.push_back(HermitianMatrix::hermitian_part(m));
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = k + 1; l < d; ++l) {
      ComplexMatrix m(d);
      m(k, l) = inv_sqrt2;
      m(l, k) = inv_sqrt2;
      basis.elements.push_back(HermitianMatrix::hermitian_part(m));
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = k + 1; l < d; ++l) {
      ComplexMatrix m(d);
      m(k, l) = Complex(0.0, inv_sqrt2);
      m(l, k) = Complex(0.0, -inv_sqrt2);
      basis.elements.push_back(HermitianMatrix::hermitian_part(m));
    }
  }
  return basis;
}

SafetyParams safety_params(std::size_t d) {
  if (d < 2) throw DimensionError("safety_params: dimension must be at least 2");
  const double dd = static_cast<double>(d);
  return SafetyParams{DensityMatrix::maximally_mixed(d),
                      std::min(1.0 / std::sqrt(dd * (dd - 1.0)), std::sqrt(2.0) / dd)};
}

DensityMatrix pivot(const DensityMatrix& x, double delta, const SafetyParams& params) {
  if (!(delta >= 0.0 && delta < params.radius)) {
    throw ScheduleError("pivot: sampling radius " + std::to_string(delta) + " outside [0, " +
                        std::to_string(params.radius) + ")");
  }
  if (x.dim() != params.reference.dim()) throw DimensionError("pivot: dimension mismatch");
  if (delta == 0.0) return x;
  const double lambda = delta / params.radius;
  return DensityMatrix(x.hermitian() * (1.0 - lambda) + params.reference.hermitian() * lambda);
}

TangentDirection sample_direction(Rng& rng, const BasisSet& basis, bool signed_set) {
  if (basis.elements.empty()) throw DimensionError("sample_direction: empty basis");
  TangentDirection out;
  if (signed_set) {
    const std::size_t k = rng.index(2 * basis.size());
    out.index = k >> 1;
    out.sign = (k & 1U) != 0 ? -1 : 1;
  } else {
    out.index = rng.index(basis.size());
    out.sign = rng.rademacher();
  }
  out.matrix = basis.elements[out.index] * static_cast<double>(out.sign);
  return out;
}

DensityMatrix displace(const DensityMatrix& x, double delta, const HermitianMatrix& w) {
  return DensityMatrix(x.hermitian() + w * delta);
}

}  // namespace qmmw
