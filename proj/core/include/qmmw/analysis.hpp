#pragma once

// Post-processing over estimator samples and trajectories.

#include <cstddef>
#include <span>
#include <vector>

#include "qmmw/game.hpp"
#include "qmmw/learning.hpp"
#include "qmmw/rng.hpp"

namespace qmmw {

inline constexpr std::size_t kMinMomentSamples = 10000;
inline constexpr std::size_t kMinFitPoints = 8;
inline constexpr double kGapFloor = 1e-12;

struct MomentReport {
  EstimatorKind kind = EstimatorKind::kTwoPoint;
  double delta = 0.0;
  std::size_t samples = 0;

  /// || mean Z - Pi V(X) ||, Pi the projection onto traceless matrices.
  double bias = 0.0;
  double bias_se = 0.0;
  double bias_bound = 0.0;  ///< 4 D L2 delta
  bool bias_pass = false;

  /// mean ||Z||^2 summed over players.
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double second_moment_bound = 0.0;  ///< 16 D^2 L^2 (2PE), 4 D^2 B^2 / delta^2 (1PE)
  bool second_moment_pass = false;

  /// max over samples and players of ||Z_i|| / per-sample bound_i
  /// (sqrt(2) D_i L for 2PE, D_i B / delta for 1PE).
  double max_sample_ratio = 0.0;
  bool sample_bound_pass = false;

  [[nodiscard]] bool pass() const noexcept { return bias_pass && second_moment_pass && sample_bound_pass; }
};

/// Monte-Carlo audit at a fixed profile. Pass iff empirical <= bound + 3 standard
/// errors. Throws ValidationError for n_samples < 1e4.
MomentReport estimator_moments(const QuantumGame& game, const Profile& profile, EstimatorKind kind, double delta,
                               std::size_t n_samples, Rng& rng);
/// Same, with caller-supplied constants.
MomentReport estimator_moments(const QuantumGame& game, const Profile& profile, EstimatorKind kind, double delta,
                               std::size_t n_samples, Rng& rng, const GameConstants& c);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least squares of log(max(gap, 1e-12)) on log t. Throws ValidationError for fewer than 8 points.
RateFit rate_fit(std::span<const double> t, std::span<const double> gap);

struct Series {
  std::vector<double> t;
  std::vector<double> values;
};

/// Points with t >= t_max / 10.
Series tail_window(const Series& series);

struct BandPoint {
  double t = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

/// Cross-seed statistics per grid point. Throws DimensionError on grid mismatch.
std::vector<BandPoint> aggregate(std::span<const Series> seeds);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double p);

struct VsOutcome {
  double success_fraction = 0.0;
  std::vector<double> final_bregman;
};

/// Fraction of runs with D(eq, X_T) strictly below threshold.
VsOutcome vs_success_rate(std::span<const Trajectory> runs, const Profile& eq, double threshold);
VsOutcome vs_success_rate(std::span<const double> final_bregman, double threshold);

}  // namespace qmmw
