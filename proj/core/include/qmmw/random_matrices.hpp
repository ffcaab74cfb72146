#pragma once

#include <cstddef>

#include "qmmw/hermitian.hpp"
#include "qmmw/rng.hpp"

namespace qmmw {

/// Hermitian matrix with iid standard normal real diagonal and complex
/// off-diagonal entries (GUE up to scaling).
HermitianMatrix random_hermitian(Rng& rng, std::size_t d);

/// G G^dagger / tr(G G^dagger) for a d x rank complex Ginibre G.
/// rank = 0 selects rank d.
DensityMatrix random_density(Rng& rng, std::size_t d, std::size_t rank = 0);

/// Random density whose rank is itself uniform on 1..d, so that boundary
/// (low-rank) and interior points are both exercised.
DensityMatrix random_density_mixed_rank(Rng& rng, std::size_t d);

}  // namespace qmmw
