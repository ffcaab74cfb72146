#pragma once

// Orthonormal basis of the traceless Hermitian matrices, the safety ball
// around the maximally mixed state, and feasible sampling directions.

#include <cstddef>
#include <vector>

#include "qmmw/hermitian.hpp"
#include "qmmw/rng.hpp"

namespace qmmw {

struct TangentDirection {
  HermitianMatrix matrix;  ///< already multiplied by `sign`
  std::size_t index = 0;   ///< position in BasisSet::elements
  int sign = 1;
};

struct BasisSet {
  std::size_t dim = 0;
  /// d^2 - 1 elements: diagonal family, then symmetric (k < l), then antisymmetric.
  std::vector<HermitianMatrix> elements;

  [[nodiscard]] std::size_t size() const noexcept { return elements.size(); }
};

struct SafetyParams {
  DensityMatrix reference;  ///< I / d
  double radius = 0.0;      ///< min(1/sqrt(d(d-1)), sqrt(2)/d)
};

BasisSet build_basis(std::size_t d);

/// Throws DimensionError for d < 2.
SafetyParams safety_params(std::size_t d);

/// X + (delta / r)(R - X). Accepts delta = 0; throws ScheduleError unless 0 <= delta < r.
DensityMatrix pivot(const DensityMatrix& x, double delta, const SafetyParams& params);

/// Uniform element of the basis. Unsigned: uniform index, then an independent
/// Rademacher sign. Signed: one uniform draw over the 2(d^2 - 1) signed elements.
/// Both variants return a signed direction; they differ only in how the draw
/// consumes the generator. Throws DimensionError on an empty basis.
TangentDirection sample_direction(Rng& rng, const BasisSet& basis, bool signed_set);

/// A density offset by a tangent direction: x + delta * w, validated.
DensityMatrix displace(const DensityMatrix& x, double delta, const HermitianMatrix& w);

}  // namespace qmmw
