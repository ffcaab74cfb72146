#pragma once

// Matrix multiplicative weights driven by exact gradients (MMW) or by
// payoff-based estimates (3MW) built from two mixed-payoff queries (2PE) or a
// single realized outcome (1PE).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmmw/game.hpp"
#include "qmmw/hermitian.hpp"
#include "qmmw/rng.hpp"
#include "qmmw/tangent_basis.hpp"

namespace qmmw {

inline constexpr double kBregmanEigenvalueClamp = 1e-15;
inline constexpr double kBregmanClampWarning = 1e-6;
inline constexpr double kEnergyResidualTolerance = 1e-8;

enum class EstimatorKind { kFullInfo, kTwoPoint, kOnePoint };

std::string_view to_string(EstimatorKind kind);
/// Accepts "mmw", "3mw-2pe", "3mw-1pe". Throws ValidationError otherwise.
EstimatorKind parse_estimator(std::string_view text);

struct ConstantSchedule {
  double gamma = 0.0;
  double delta = 0.0;
};

/// gamma_t = gamma0 t^{-p}, delta_t = delta0 t^{-q}.
struct PowerSchedule {
  double gamma0 = 0.0;
  double p = 0.0;
  double delta0 = 0.0;
  double q = 0.0;
};

class Schedule {
 public:
  Schedule() = default;
  Schedule(ConstantSchedule c) : spec_(c) {}
  Schedule(PowerSchedule p) : spec_(p) {}

  /// t counts from 1.
  [[nodiscard]] double gamma(std::size_t t) const;
  [[nodiscard]] double delta(std::size_t t) const;
  [[nodiscard]] const std::variant<ConstantSchedule, PowerSchedule>& spec() const noexcept { return spec_; }

 private:
  std::variant<ConstantSchedule, PowerSchedule> spec_;
};

/// Sampling basis and safety ball for one player.
struct PlayerGeometry {
  BasisSet basis;
  SafetyParams safety;
};

/// Throws DimensionError when a player has dimension 1.
std::vector<PlayerGeometry> player_geometry(const QuantumGame& game);
double min_radius(const std::vector<PlayerGeometry>& geometry);

struct LearnerState {
  std::vector<HermitianMatrix> dual;
  std::size_t t = 0;

  /// Y_i = 0 for every player.
  static LearnerState initial(const QuantumGame& game);
  [[nodiscard]] Profile profile() const;
};

struct EstimatorDiagnostics {
  std::vector<std::size_t> directions;
  std::vector<int> signs;
  /// 2PE: u(X+) for every player, then u(X-). 1PE: realized payoffs.
  std::vector<double> observed_payoffs;
  std::optional<std::size_t> outcome;
};

struct GradientEstimate {
  std::vector<HermitianMatrix> z;
  EstimatorDiagnostics diagnostics;
};

/// Y_i += gamma Z_i. Throws ValidationError on non-finite Z or gamma.
LearnerState mmw_step(const LearnerState& state, double gamma, const GradientEstimate& estimate);

GradientEstimate full_info_estimate(const QuantumGame& game, const Profile& profile);

/// Joint pivot, per-player basis draw with an independent sign, and the
/// difference of the exact mixed payoffs at X^ + delta s W and X^ - delta s W.
/// Throws ScheduleError unless 0 < delta < min_i r_i.
GradientEstimate estimate_2pe(const QuantumGame& game, const Profile& profile, double delta,
                              const std::vector<PlayerGeometry>& geometry, Rng& rng);

/// Every player plays X^_i + delta W_i with W_i uniform on the signed basis,
/// one outcome is measured and Z_i = (D_i / delta) u_i(outcome) W_i.
/// Throws ValidationError for observable-form games.
GradientEstimate estimate_1pe(const QuantumGame& game, const Profile& profile, double delta,
                              const std::vector<PlayerGeometry>& geometry, Rng& rng);

GradientEstimate estimate(EstimatorKind kind, const QuantumGame& game, const Profile& profile, double delta,
                          const std::vector<PlayerGeometry>& geometry, Rng& rng);

struct BregmanValue {
  double value = 0.0;
  std::size_t clamped_eigenvalues = 0;
  double clamped_mass = 0.0;  ///< sum of (clamp - eigenvalue) over clamped eigenvalues of X
  [[nodiscard]] bool warning() const noexcept { return clamped_mass > kBregmanClampWarning; }
};

/// tr(P (log P - log X)) with 0 log 0 = 0 and eigenvalues of X clamped at 1e-15.
BregmanValue bregman(const DensityMatrix& p, const DensityMatrix& x);
/// Sum over players.
BregmanValue bregman(const Profile& p, const Profile& x);

/// RHS - LHS of D(P, X_next) <= D(P, X_t) + gamma tr(Z (X_t - P)) + gamma^2/2 ||Z||^2.
double energy_audit(const Profile& reference, const Profile& x_t, const Profile& x_next, double gamma,
                    const std::vector<HermitianMatrix>& z);

/// Constant schedule prescribed for horizon T. Throws ScheduleError if a
/// constant is not positive or if delta >= min_radius, naming the smallest
/// feasible horizon in the latter case.
ConstantSchedule theorem_tuning(EstimatorKind kind, std::size_t horizon, const GameConstants& c, double min_radius);

/// Smallest horizon at which the tuned delta is below min_radius (1 for full information).
std::size_t minimal_feasible_horizon(EstimatorKind kind, const GameConstants& c, double min_radius);

/// Expected duality gap bound of the ergodic average at horizon T under theorem_tuning.
double theorem_bound(EstimatorKind kind, double horizon, const GameConstants& c);

struct SeriesVerdict {
  std::string name;     ///< "Σγ", "Σγδ" or "Σγ²/δ²"
  double exponent = 0;  ///< t-exponent of the summand, the series is sum t^{-exponent}
  bool ok = false;
  std::string message;  ///< e.g. "Σγ²/δ² diverges"
};

struct VsScheduleReport {
  bool valid = false;
  std::vector<SeriesVerdict> series;
  /// Failing verdict messages joined by "; " (empty when valid).
  [[nodiscard]] std::string failures() const;
};

/// Conditions on gamma_t = t^{-p}, delta_t = t^{-q}: sum gamma = inf,
/// sum gamma delta < inf, sum gamma^2 / delta^2 < inf.
VsScheduleReport schedule_validate_vs(double p, double q);

struct StepRecord {
  std::size_t t = 0;
  Profile profile;  ///< X_t
  Profile average;  ///< (1/t) sum_{s <= t} X_s
  std::optional<double> gap;      ///< duality gap of the average (zero-sum games)
  std::optional<double> bregman;  ///< D(reference, X_t) when a reference was supplied
  std::vector<double> payoffs;    ///< mixed payoffs at X_t
  double energy_residual = 0.0;   ///< audit of the step t -> t+1
  double gamma = 0.0;
  double delta = 0.0;
  EstimatorDiagnostics diagnostics;
  bool bregman_clamp_warning = false;
};

struct RunOptions {
  /// Bregman reference; when absent the audit uses the uniform profile and no bregman column is recorded.
  std::optional<Profile> reference;
  /// Explicit recording grid (sorted, within [1, T]). Overrides stride.
  std::vector<std::size_t> record_grid;
  /// 0 selects the default grid.
  std::size_t stride = 0;
  /// Keep X_t, the running average and estimator diagnostics in each record.
  bool record_profiles = true;
};

struct Trajectory {
  std::vector<StepRecord> records;
  std::size_t horizon = 0;
  double min_energy_residual = 0.0;  ///< over every step, recorded or not
  std::size_t energy_violations = 0; ///< steps with residual < -1e-8
  Profile final_profile;             ///< X_T
  Profile final_average;             ///< X-bar_T
};

/// Every step for T <= 1e4; above that every t <= 100 and then 50 points per decade. Always contains T.
std::vector<std::size_t> default_record_grid(std::size_t horizon);
std::vector<std::size_t> stride_record_grid(std::size_t horizon, std::size_t stride);

/// Runs T rounds from Y = 0. Throws ScheduleError if delta_t leaves [0, min r) for the
/// estimating kinds, and ValidationError for 1PE on an observable-form game.
Trajectory run(const QuantumGame& game, EstimatorKind kind, const Schedule& schedule, std::size_t horizon, Rng& rng,
               const RunOptions& options = {});

}  // namespace qmmw
