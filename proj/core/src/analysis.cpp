#include "qmmw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qmmw/errors.hpp"

namespace qmmw {

namespace {

HermitianMatrix traceless(const HermitianMatrix& v) {
  const double shift = v.trace() / static_cast<double>(v.dim());
  return v - HermitianMatrix::identity(v.dim()) * shift;
}

// Order-independent sum.
double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace

MomentReport estimator_moments(const QuantumGame& game, const Profile& profile, EstimatorKind kind, double delta,
                               std::size_t n_samples, Rng& rng) {
  return estimator_moments(game, profile, kind, delta, n_samples, rng, constants(game));
}

MomentReport estimator_moments(const QuantumGame& game, const Profile& profile, EstimatorKind kind, double delta,
                               std::size_t n_samples, Rng& rng, const GameConstants& c) {
  if (n_samples < kMinMomentSamples) {
    throw ValidationError("estimator_moments: at least " + std::to_string(kMinMomentSamples) +
                          " samples are required, got " + std::to_string(n_samples));
  }
  check_profile(game, profile);
  const auto geometry = player_geometry(game);
  const std::size_t n = game.players();
  const double d_max = static_cast<double>(c.D_max());

  std::vector<double> per_sample_bound(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(c.D[i]);
    per_sample_bound[i] = kind == EstimatorKind::kOnePoint ? di * c.B / delta : std::sqrt(2.0) * di * c.L.analytic;
  }

  std::vector<HermitianMatrix> target;
  for (const auto& v : gradients(game, profile)) target.push_back(traceless(v));

  std::vector<HermitianMatrix> sum;
  for (std::size_t dim : game.dims()) sum.push_back(HermitianMatrix::zero(dim));
  double sq_sum = 0.0;
  double sq_sq_sum = 0.0;
  double max_ratio = 0.0;

  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto est = estimate(kind, game, profile, delta, geometry, rng);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum[i] += est.z[i];
      const double norm = frob_norm(est.z[i]);
      sq += norm * norm;
      if (per_sample_bound[i] > 0.0) {
        max_ratio = std::max(max_ratio, norm / per_sample_bound[i]);
      } else if (norm > 0.0) {
        max_ratio = std::numeric_limits<double>::infinity();
      }
    }
    sq_sum += sq;
    sq_sq_sum += sq * sq;
  }

  const double count = static_cast<double>(n_samples);
  MomentReport r;
  r.kind = kind;
  r.delta = delta;
  r.samples = n_samples;

  double bias_sq = 0.0;
  double mean_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const HermitianMatrix mean = sum[i] * (1.0 / count);
    const double b = frob_norm(mean - target[i]);
    bias_sq += b * b;
    const double m = frob_norm(mean);
    mean_sq += m * m;
  }
  r.bias = std::sqrt(bias_sq);
  r.second_moment = sq_sum / count;
  // Standard error of the mean vector: sqrt(tr Cov(Z) / n).
  r.bias_se = std::sqrt(std::max(0.0, r.second_moment - mean_sq) / count);
  const double var_sq = std::max(0.0, sq_sq_sum / count - r.second_moment * r.second_moment);
  r.second_moment_se = std::sqrt(var_sq / count);

  r.bias_bound = 4.0 * d_max * c.L2.analytic * delta;
  r.second_moment_bound = kind == EstimatorKind::kOnePoint
                              ? 4.0 * d_max * d_max * c.B * c.B / (delta * delta)
                              : 16.0 * d_max * d_max * c.L.analytic * c.L.analytic;
  if (kind == EstimatorKind::kFullInfo) {
    r.bias_bound = 0.0;
    r.second_moment_bound = c.L.analytic * c.L.analytic;
  }
  r.bias_pass = r.bias <= r.bias_bound + 3.0 * r.bias_se;
  r.second_moment_pass = r.second_moment <= r.second_moment_bound + 3.0 * r.second_moment_se;
  r.max_sample_ratio = max_ratio;
  // ||Z_i|| = (D_i / delta) |u| ||W_i|| exactly in real arithmetic; allow for rounding in ||W_i||.
  r.sample_bound_pass = kind == EstimatorKind::kFullInfo || max_ratio <= 1.0 + 1e-12;
  return r;
}

RateFit rate_fit(std::span<const double> t, std::span<const double> gap) {
  if (t.size() != gap.size()) throw DimensionError("rate_fit: series lengths differ");
  if (t.size() < kMinFitPoints) {
    throw ValidationError("rate_fit: need at least " + std::to_string(kMinFitPoints) + " points, got " +
                          std::to_string(t.size()));
  }
  const std::size_t n = t.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(t[k] > 0.0)) throw ValidationError("rate_fit: times must be positive");
    x[k] = std::log(t[k]);
    y[k] = std::log(std::max(gap[k], kGapFloor));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("rate_fit: times must not all coincide");
  RateFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

Series tail_window(const Series& series) {
  if (series.t.empty()) return {};
  const double t_max = *std::max_element(series.t.begin(), series.t.end());
  Series out;
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    if (series.t[k] >= t_max / 10.0) {
      out.t.push_back(series.t[k]);
      out.values.push_back(series.values[k]);
    }
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<BandPoint> aggregate(std::span<const Series> seeds) {
  if (seeds.empty()) return {};
  const auto& grid = seeds.front().t;
  for (const auto& s : seeds) {
    if (s.t != grid || s.values.size() != grid.size()) {
      throw DimensionError("aggregate: seed series use different recording grids");
    }
  }
  std::vector<BandPoint> out(grid.size());
  std::vector<double> column(seeds.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t s = 0; s < seeds.size(); ++s) column[s] = seeds[s].values[k];
    out[k].t = grid[k];
    out[k].mean = stable_sum(column) / static_cast<double>(column.size());
    out[k].median = quantile(column, 0.5);
    out[k].q10 = quantile(column, 0.1);
    out[k].q90 = quantile(column, 0.9);
  }
  return out;
}

VsOutcome vs_success_rate(std::span<const Trajectory> runs, const Profile& eq, double threshold) {
  std::vector<double> finals;
  finals.reserve(runs.size());
  for (const auto& r : runs) finals.push_back(bregman(eq, r.final_profile).value);
  return vs_success_rate(finals, threshold);
}

VsOutcome vs_success_rate(std::span<const double> final_bregman, double threshold) {
  VsOutcome out;
  out.final_bregman.assign(final_bregman.begin(), final_bregman.end());
  if (final_bregman.empty()) return out;
  const auto hits = std::count_if(final_bregman.begin(), final_bregman.end(), [&](double v) { return v < threshold; });
  out.success_fraction = static_cast<double>(hits) / static_cast<double>(final_bregman.size());
  return out;
}

}  // namespace qmmw
