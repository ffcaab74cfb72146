#include "qmmw/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "qmmw/errors.hpp"

namespace qmmw {

namespace {

struct SpectralTerm {
  double value = 0.0;
  std::size_t clamped = 0;
  double clamped_mass = 0.0;
};

// tr(P log P) with 0 log 0 = 0.
double neg_entropy(const DensityMatrix& p) {
  double sum = 0.0;
  for (double lambda : eigh(p.hermitian()).eigenvalues) {
    if (lambda > 0.0) sum += lambda * std::log(lambda);
  }
  return sum;
}

// tr(P log X) with eigenvalues of X clamped from below.
SpectralTerm cross_log(const DensityMatrix& p, const DensityMatrix& x) {
  const auto dec = eigh(x.hermitian());
  const std::size_t n = x.dim();
  SpectralTerm out;
  for (std::size_t k = 0; k < n; ++k) {
    double mu = dec.eigenvalues[k];
    if (mu < kBregmanEigenvalueClamp) {
      ++out.clamped;
      out.clamped_mass += kBregmanEigenvalueClamp - mu;
      mu = kBregmanEigenvalueClamp;
    }
    // <u_k | P | u_k>
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex row{};
      for (std::size_t j = 0; j < n; ++j) row += p(i, j) * dec.unitary(j, k);
      weight += (std::conj(dec.unitary(i, k)) * row).real();
    }
    out.value += weight * std::log(mu);
  }
  return out;
}

// D(P, .) against a fixed reference profile, caching tr(P log P).
class BregmanReference {
 public:
  explicit BregmanReference(Profile reference) : reference_(std::move(reference)) {
    for (const auto& p : reference_) neg_entropy_ += neg_entropy(p);
  }

  [[nodiscard]] BregmanValue operator()(const Profile& x) const {
    BregmanValue out;
    out.value = neg_entropy_;
    for (std::size_t i = 0; i < reference_.size(); ++i) {
      const auto term = cross_log(reference_[i], x[i]);
      out.value -= term.value;
      out.clamped_eigenvalues += term.clamped;
      out.clamped_mass += term.clamped_mass;
    }
    return out;
  }

  [[nodiscard]] const Profile& reference() const noexcept { return reference_; }

 private:
  Profile reference_;
  double neg_entropy_ = 0.0;
};

double linear_and_quadratic(const Profile& reference, const Profile& x_t, double gamma,
                            const std::vector<HermitianMatrix>& z) {
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    linear += trace_product(z[i], x_t[i].hermitian() - reference[i].hermitian());
    const double n = frob_norm(z[i]);
    quadratic += n * n;
  }
  return gamma * linear + 0.5 * gamma * gamma * quadratic;
}

void require_radius(double delta, const std::vector<PlayerGeometry>& geometry, const char* who) {
  const double r = min_radius(geometry);
  if (!(delta > 0.0 && delta < r)) {
    throw ScheduleError(std::string(who) + ": sampling radius " + std::to_string(delta) + " outside (0, " +
                        std::to_string(r) + ")");
  }
}

Profile pivot_profile(const Profile& profile, double delta, const std::vector<PlayerGeometry>& geometry) {
  Profile out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) out.push_back(pivot(profile[i], delta, geometry[i].safety));
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kFullInfo:
      return "mmw";
    case EstimatorKind::kTwoPoint:
      return "3mw-2pe";
    case EstimatorKind::kOnePoint:
      return "3mw-1pe";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view text) {
  if (text == "mmw") return EstimatorKind::kFullInfo;
  if (text == "3mw-2pe") return EstimatorKind::kTwoPoint;
  if (text == "3mw-1pe") return EstimatorKind::kOnePoint;
  throw ValidationError("unknown algorithm '" + std::string(text) + "' (expected mmw, 3mw-2pe or 3mw-1pe)");
}

double Schedule::gamma(std::size_t t) const {
  if (const auto* c = std::get_if<ConstantSchedule>(&spec_)) return c->gamma;
  const auto& p = std::get<PowerSchedule>(spec_);
  return p.gamma0 * std::pow(static_cast<double>(t), -p.p);
}

double Schedule::delta(std::size_t t) const {
  if (const auto* c = std::get_if<ConstantSchedule>(&spec_)) return c->delta;
  const auto& p = std::get<PowerSchedule>(spec_);
  return p.delta0 * std::pow(static_cast<double>(t), -p.q);
}

std::vector<PlayerGeometry> player_geometry(const QuantumGame& game) {
  std::vector<PlayerGeometry> out;
  out.reserve(game.players());
  for (std::size_t d : game.dims()) out.push_back({build_basis(d), safety_params(d)});
  return out;
}

double min_radius(const std::vector<PlayerGeometry>& geometry) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& g : geometry) r = std::min(r, g.safety.radius);
  return r;
}

LearnerState LearnerState::initial(const QuantumGame& game) {
  LearnerState s;
  for (std::size_t d : game.dims()) s.dual.push_back(HermitianMatrix::zero(d));
  return s;
}

Profile LearnerState::profile() const {
  Profile out;
  out.reserve(dual.size());
  for (const auto& y : dual) out.push_back(softmax_density(y));
  return out;
}

LearnerState mmw_step(const LearnerState& state, double gamma, const GradientEstimate& estimate) {
  if (estimate.z.size() != state.dual.size()) throw DimensionError("mmw_step: estimate has wrong player count");
  if (!std::isfinite(gamma)) throw ValidationError("mmw_step: non-finite step size");
  LearnerState next;
  next.t = state.t + 1;
  next.dual.reserve(state.dual.size());
  for (std::size_t i = 0; i < state.dual.size(); ++i) {
    if (!estimate.z[i].is_finite()) throw ValidationError("mmw_step: non-finite gradient estimate");
    if (estimate.z[i].dim() != state.dual[i].dim()) throw DimensionError("mmw_step: dimension mismatch");
    next.dual.push_back(state.dual[i] + estimate.z[i] * gamma);
  }
  return next;
}

GradientEstimate full_info_estimate(const QuantumGame& game, const Profile& profile) {
  return GradientEstimate{gradients(game, profile), {}};
}

GradientEstimate estimate_2pe(const QuantumGame& game, const Profile& profile, double delta,
                              const std::vector<PlayerGeometry>& geometry, Rng& rng) {
  check_profile(game, profile);
  require_radius(delta, geometry, "estimate_2pe");
  const Profile center = pivot_profile(profile, delta, geometry);
  const std::size_t n = game.players();

  GradientEstimate out;
  std::vector<HermitianMatrix> directions;
  Profile plus;
  Profile minus;
  for (std::size_t i = 0; i < n; ++i) {
    auto dir = sample_direction(rng, geometry[i].basis, false);
    plus.push_back(displace(center[i], delta, dir.matrix));
    minus.push_back(displace(center[i], -delta, dir.matrix));
    out.diagnostics.directions.push_back(dir.index);
    out.diagnostics.signs.push_back(dir.sign);
    directions.push_back(std::move(dir.matrix));
  }
  const auto up = payoffs(game, plus);
  const auto down = payoffs(game, minus);
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = static_cast<double>(geometry[i].basis.size()) / (2.0 * delta) * (up[i] - down[i]);
    out.z.push_back(directions[i] * scale);
  }
  out.diagnostics.observed_payoffs = up;
  out.diagnostics.observed_payoffs.insert(out.diagnostics.observed_payoffs.end(), down.begin(), down.end());
  return out;
}

GradientEstimate estimate_1pe(const QuantumGame& game, const Profile& profile, double delta,
                              const std::vector<PlayerGeometry>& geometry, Rng& rng) {
  if (game.form() != GameForm::kPovm) throw ValidationError("bandit mode requires POVM form");
  check_profile(game, profile);
  require_radius(delta, geometry, "estimate_1pe");
  const Profile center = pivot_profile(profile, delta, geometry);
  const std::size_t n = game.players();

  GradientEstimate out;
  std::vector<HermitianMatrix> directions;
  Profile played;
  for (std::size_t i = 0; i < n; ++i) {
    auto dir = sample_direction(rng, geometry[i].basis, true);
    played.push_back(displace(center[i], delta, dir.matrix));
    out.diagnostics.directions.push_back(dir.index);
    out.diagnostics.signs.push_back(dir.sign);
    directions.push_back(std::move(dir.matrix));
  }
  const std::size_t outcome = sample_outcome(rng, game, played);
  const auto& realized = game.outcomes()[outcome].payoffs;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = static_cast<double>(geometry[i].basis.size()) / delta * realized[i];
    out.z.push_back(directions[i] * scale);
  }
  out.diagnostics.outcome = outcome;
  out.diagnostics.observed_payoffs = realized;
  return out;
}

GradientEstimate estimate(EstimatorKind kind, const QuantumGame& game, const Profile& profile, double delta,
                          const std::vector<PlayerGeometry>& geometry, Rng& rng) {
  switch (kind) {
    case EstimatorKind::kFullInfo:
      return full_info_estimate(game, profile);
    case EstimatorKind::kTwoPoint:
      return estimate_2pe(game, profile, delta, geometry, rng);
    case EstimatorKind::kOnePoint:
      return estimate_1pe(game, profile, delta, geometry, rng);
  }
  throw ValidationError("estimate: unknown estimator kind");
}

BregmanValue bregman(const DensityMatrix& p, const DensityMatrix& x) {
  if (p.dim() != x.dim()) throw DimensionError("bregman: dimension mismatch");
  const auto term = cross_log(p, x);
  return BregmanValue{neg_entropy(p) - term.value, term.clamped, term.clamped_mass};
}

BregmanValue bregman(const Profile& p, const Profile& x) {
  if (p.size() != x.size()) throw DimensionError("bregman: player count mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].dim() != x[i].dim()) throw DimensionError("bregman: dimension mismatch");
  }
  return BregmanReference(p)(x);
}

double energy_audit(const Profile& reference, const Profile& x_t, const Profile& x_next, double gamma,
                    const std::vector<HermitianMatrix>& z) {
  if (reference.size() != x_t.size() || x_next.size() != x_t.size() || z.size() != x_t.size()) {
    throw DimensionError("energy_audit: player count mismatch");
  }
  const BregmanReference d(reference);
  return d(x_t).value + linear_and_quadratic(reference, x_t, gamma, z) - d(x_next).value;
}

std::size_t minimal_feasible_horizon(EstimatorKind kind, const GameConstants& c, double min_radius) {
  if (kind == EstimatorKind::kFullInfo) return 1;
  // delta(T) = k T^{-1/e}
  double k = 0.0;
  double e = 0.0;
  if (kind == EstimatorKind::kTwoPoint) {
    k = (c.L.analytic / c.L2.analytic) * std::sqrt(c.hmax / 8.0);
    e = 2.0;
  } else {
    k = std::pow(c.hmax / 2.0, 0.25) * std::sqrt(c.B / (4.0 * c.L2.analytic));
    e = 4.0;
  }
  const double ratio = std::pow(k / min_radius, e);
  auto horizon = static_cast<std::size_t>(std::max(1.0, std::floor(ratio) + 1.0));
  auto delta_at = [&](std::size_t t) { return k * std::pow(static_cast<double>(t), -1.0 / e); };
  while (horizon > 1 && delta_at(horizon - 1) < min_radius) --horizon;
  while (delta_at(horizon) >= min_radius) ++horizon;
  return horizon;
}

ConstantSchedule theorem_tuning(EstimatorKind kind, std::size_t horizon, const GameConstants& c, double min_radius) {
  if (horizon == 0) throw ScheduleError("theorem_tuning: horizon must be positive");
  const double t = static_cast<double>(horizon);
  const double d = static_cast<double>(c.D_max());
  const double l = c.L.analytic;
  const double l2 = c.L2.analytic;
  if (!(l > 0.0) || !(c.hmax > 0.0)) throw ScheduleError("theorem_tuning: L and hmax must be positive");

  ConstantSchedule s;
  switch (kind) {
    case EstimatorKind::kFullInfo:
      s.gamma = std::sqrt(2.0 * c.hmax / t) / l;
      s.delta = 0.0;
      return s;
    case EstimatorKind::kTwoPoint:
      if (!(l2 > 0.0) || !(d > 0.0)) throw ScheduleError("theorem_tuning: L2 and D must be positive");
      s.gamma = std::sqrt(c.hmax / (8.0 * t)) / (d * l);
      s.delta = (l / l2) * std::sqrt(c.hmax / (8.0 * t));
      break;
    case EstimatorKind::kOnePoint:
      if (!(l2 > 0.0) || !(d > 0.0) || !(c.B > 0.0)) {
        throw ScheduleError("theorem_tuning: B, L2 and D must be positive");
      }
      s.gamma = std::pow(c.hmax / (2.0 * t), 0.75) / (2.0 * d * std::sqrt(c.B * l2));
      s.delta = std::pow(c.hmax / (2.0 * t), 0.25) * std::sqrt(c.B / (4.0 * l2));
      break;
  }
  if (!(s.delta < min_radius)) {
    throw ScheduleError("theorem tuning for T=" + std::to_string(horizon) + " gives sampling radius " +
                        format_double(s.delta) + " >= safety radius " + format_double(min_radius) +
                        "; minimal feasible T is " + std::to_string(minimal_feasible_horizon(kind, c, min_radius)));
  }
  return s;
}

double theorem_bound(EstimatorKind kind, double horizon, const GameConstants& c) {
  const double d = static_cast<double>(c.D_max());
  switch (kind) {
    case EstimatorKind::kFullInfo:
      return c.L.analytic * std::sqrt(2.0 * c.hmax / horizon);
    case EstimatorKind::kTwoPoint:
      return 8.0 * d * c.L.analytic * std::sqrt(2.0 * c.hmax / horizon);
    case EstimatorKind::kOnePoint:
      return std::pow(2.0, 0.75) * 8.0 * std::pow(c.hmax, 0.25) * d * std::sqrt(c.B * c.L2.analytic) /
             std::pow(horizon, 0.25);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string VsScheduleReport::failures() const {
  std::string out;
  for (const auto& s : series) {
    if (s.ok) continue;
    if (!out.empty()) out += "; ";
    out += s.message;
  }
  return out;
}

VsScheduleReport schedule_validate_vs(double p, double q) {
  VsScheduleReport r;
  // sum t^{-a} converges iff a > 1.
  const double e_gamma = p;
  const double e_gamma_delta = p + q;
  const double e_ratio = 2.0 * p - 2.0 * q;

  SeriesVerdict s1{"Σγ", e_gamma, e_gamma <= 1.0, ""};
  s1.message = s1.ok ? "Σγ diverges" : "Σγ converges";
  SeriesVerdict s2{"Σγδ", e_gamma_delta, e_gamma_delta > 1.0, ""};
  s2.message = s2.ok ? "Σγδ converges" : "Σγδ diverges";
  SeriesVerdict s3{"Σγ²/δ²", e_ratio, e_ratio > 1.0, ""};
  s3.message = s3.ok ? "Σγ²/δ² converges" : "Σγ²/δ² diverges";

  r.series = {s1, s2, s3};
  r.valid = s1.ok && s2.ok && s3.ok;
  return r;
}

std::vector<std::size_t> default_record_grid(std::size_t horizon) {
  std::vector<std::size_t> grid;
  if (horizon == 0) return grid;
  if (horizon <= 10000) {
    grid.resize(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) grid[t - 1] = t;
    return grid;
  }
  for (std::size_t t = 1; t <= 100; ++t) grid.push_back(t);
  for (int k = 1;; ++k) {
    const auto t = static_cast<std::size_t>(std::llround(std::pow(10.0, 2.0 + k / 50.0)));
    if (t >= horizon) break;
    if (t > grid.back()) grid.push_back(t);
  }
  grid.push_back(horizon);
  return grid;
}

std::vector<std::size_t> stride_record_grid(std::size_t horizon, std::size_t stride) {
  if (stride == 0) return default_record_grid(horizon);
  std::vector<std::size_t> grid;
  if (horizon == 0) return grid;
  grid.push_back(1);
  for (std::size_t t = stride; t <= horizon; t += stride) {
    if (t > grid.back()) grid.push_back(t);
  }
  if (grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

Trajectory run(const QuantumGame& game, EstimatorKind kind, const Schedule& schedule, std::size_t horizon, Rng& rng,
               const RunOptions& options) {
  if (kind == EstimatorKind::kOnePoint && game.form() != GameForm::kPovm) {
    throw ValidationError("bandit mode requires POVM form");
  }
  std::vector<PlayerGeometry> geometry;
  double radius = std::numeric_limits<double>::infinity();
  if (kind != EstimatorKind::kFullInfo) {
    geometry = player_geometry(game);
    radius = min_radius(geometry);
  }
  if (const auto* c = std::get_if<ConstantSchedule>(&schedule.spec())) {
    if (kind != EstimatorKind::kFullInfo && !(c->delta > 0.0 && c->delta < radius)) {
      throw ScheduleError("sampling radius " + format_double(c->delta) + " outside (0, " + format_double(radius) +
                          ")");
    }
  }

  std::vector<std::size_t> grid = options.record_grid.empty() ? stride_record_grid(horizon, options.stride)
                                                              : options.record_grid;
  const bool zero_sum = game.zero_sum() && game.players() == 2;
  const BregmanReference audit(options.reference ? *options.reference : uniform_profile(game));
  if (options.reference) check_profile(game, *options.reference);

  Trajectory traj;
  traj.horizon = horizon;
  traj.min_energy_residual = std::numeric_limits<double>::infinity();

  LearnerState state = LearnerState::initial(game);
  Profile x = state.profile();
  BregmanValue d_x = audit(x);
  std::vector<HermitianMatrix> sum;
  for (std::size_t dim : game.dims()) sum.push_back(HermitianMatrix::zero(dim));

  std::size_t next_record = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double gamma = schedule.gamma(t);
    const double delta = kind == EstimatorKind::kFullInfo ? 0.0 : schedule.delta(t);
    if (kind != EstimatorKind::kFullInfo && !(delta > 0.0 && delta < radius)) {
      throw ScheduleError("sampling radius " + format_double(delta) + " at t=" + std::to_string(t) +
                          " outside (0, " + format_double(radius) + ")");
    }
    if (!(gamma > 0.0)) throw ScheduleError("step size must be positive (t=" + std::to_string(t) + ")");

    auto est = estimate(kind, game, x, delta, geometry, rng);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i].hermitian();

    LearnerState next = mmw_step(state, gamma, est);
    Profile x_next = next.profile();
    const BregmanValue d_next = audit(x_next);
    const double residual = d_x.value + linear_and_quadratic(audit.reference(), x, gamma, est.z) - d_next.value;
    traj.min_energy_residual = std::min(traj.min_energy_residual, residual);
    if (residual < -kEnergyResidualTolerance) ++traj.energy_violations;

    const bool last = t == horizon;
    const bool record = next_record < grid.size() && grid[next_record] == t;
    if (record || last) {
      Profile average;
      const double inv_t = 1.0 / static_cast<double>(t);
      for (const auto& s : sum) average.push_back(DensityMatrix(s * inv_t));
      if (record) {
        StepRecord rec;
        rec.t = t;
        if (options.record_profiles) {
          rec.profile = x;
          rec.average = average;
          rec.diagnostics = std::move(est.diagnostics);
        }
        if (zero_sum) rec.gap = duality_gap(game, average);
        if (options.reference) {
          rec.bregman = d_x.value;
          rec.bregman_clamp_warning = d_x.warning();
        }
        rec.payoffs = payoffs(game, x);
        rec.energy_residual = residual;
        rec.gamma = gamma;
        rec.delta = delta;
        traj.records.push_back(std::move(rec));
        ++next_record;
      }
      if (last) {
        traj.final_profile = x;
        traj.final_average = std::move(average);
      }
    }

    state = std::move(next);
    x = std::move(x_next);
    d_x = d_next;
  }
  if (horizon == 0) traj.min_energy_residual = 0.0;
  return traj;
}

}  // namespace qmmw
