#pragma once

// N-player quantum games: each player prepares a density matrix, a joint
// POVM is measured on the product state and every outcome carries one scalar
// payoff per player. Equivalently each player has a payoff observable W_i on
// the product space and the mixed payoff is tr(W_i X_1 (x) ... (x) X_N).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmmw/hermitian.hpp"
#include "qmmw/rng.hpp"

namespace qmmw {

using Profile = std::vector<DensityMatrix>;

inline constexpr double kCompletenessTolerance = 1e-10;
inline constexpr double kZeroSumTolerance = 1e-10;
inline constexpr double kOutcomeMassTolerance = 1e-8;

enum class GameForm { kPovm, kObservables };

struct PovmOutcome {
  HermitianMatrix element;      ///< on the product space
  std::vector<double> payoffs;  ///< one per player
};

class QuantumGame {
 public:
  /// Throws DimensionError on inconsistent shapes. Semantic checks are left to validate().
  static QuantumGame from_povm(std::vector<std::size_t> dims, std::vector<PovmOutcome> outcomes,
                               bool zero_sum = false);
  static QuantumGame from_observables(std::vector<std::size_t> dims, std::vector<HermitianMatrix> observables,
                                      bool zero_sum = false);

  [[nodiscard]] std::size_t players() const noexcept { return dims_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t product_dim() const noexcept { return product_dim_; }
  [[nodiscard]] GameForm form() const noexcept { return form_; }
  [[nodiscard]] bool zero_sum() const noexcept { return zero_sum_; }
  /// Empty for observable-form games.
  [[nodiscard]] const std::vector<PovmOutcome>& outcomes() const noexcept { return outcomes_; }
  /// W_i for every player (derived once for POVM-form games).
  [[nodiscard]] const std::vector<HermitianMatrix>& observables() const noexcept { return observables_; }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::optional<Profile>& equilibrium() const noexcept { return equilibrium_; }
  QuantumGame& set_name(std::string name);
  /// Throws DimensionError if the profile does not fit the game.
  QuantumGame& set_equilibrium(Profile eq);

  friend bool operator==(const QuantumGame&, const QuantumGame&) = default;

 private:
  QuantumGame() = default;

  std::vector<std::size_t> dims_;
  std::size_t product_dim_ = 1;
  GameForm form_ = GameForm::kObservables;
  bool zero_sum_ = false;
  std::vector<PovmOutcome> outcomes_;
  std::vector<HermitianMatrix> observables_;
  std::string name_;
  std::optional<Profile> equilibrium_;
};

struct Violation {
  std::string what;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const QuantumGame& game);

/// W_i = sum_w u_i(w) P_w. Throws ValidationError on observable-form games.
std::vector<HermitianMatrix> observables_from_povm(const QuantumGame& game);

/// Throws DimensionError when the profile does not match the game.
void check_profile(const QuantumGame& game, const Profile& profile);

double payoff(const QuantumGame& game, const Profile& profile, std::size_t player);
/// All players' payoffs, sharing one tensor product.
std::vector<double> payoffs(const QuantumGame& game, const Profile& profile);

/// V_i(X): Hermitian d_i x d_i with tr(V_i X_i) = u_i(X); ignores profile[player].
HermitianMatrix gradient(const QuantumGame& game, const Profile& profile, std::size_t player);
std::vector<HermitianMatrix> gradients(const QuantumGame& game, const Profile& profile);

/// tr(P_w X_1 (x) ... (x) X_N) for every outcome, clamped to [0, 1] and
/// renormalized. Throws ValidationError if the raw mass is off by >= 1e-8.
std::vector<double> outcome_probabilities(const QuantumGame& game, const Profile& profile);
std::size_t sample_outcome(Rng& rng, const QuantumGame& game, const Profile& profile);

/// max_{X_1} L(X_1, X_2) - min_{X_2} L(X_1, X_2) with u_1 = L, u_2 = -L.
/// Throws ValidationError unless the game is a two-player zero-sum game.
double duality_gap(const QuantumGame& game, const Profile& profile);

struct BoundPair {
  double analytic = 0.0;
  std::optional<double> empirical;  ///< Monte-Carlo lower estimate, if requested
};

struct GameConstants {
  double B = 0.0;   ///< payoff bound
  BoundPair L;      ///< Lipschitz bound on ||V(X)||
  BoundPair L2;     ///< smoothness bound of V
  double K = 1.0;   ///< strong convexity modulus of the entropy
  double hmax = 0;  ///< sum_i log d_i
  std::vector<std::size_t> D;  ///< d_i^2 - 1 per player
  [[nodiscard]] std::size_t D_max() const;
};

GameConstants constants(const QuantumGame& game);
/// Adds Monte-Carlo estimates of L and L2 from n random profiles / pairs.
GameConstants constants(const QuantumGame& game, Rng& rng, std::size_t n_samples);

struct VsReport {
  double max_term = 0.0;           ///< max tr(V(X)(X - X*)) over non-degenerate samples
  double violation_fraction = 0.0; ///< share of samples with term >= -1e-10
  std::size_t samples = 0;
  std::size_t degenerate = 0;      ///< samples within 1e-9 of the candidate, excluded
  bool plausible = false;
};

/// Samples profiles within Frobenius distance `radius` of `candidate` and
/// evaluates sum_i tr(V_i(X)(X_i - X*_i)).
VsReport vs_certificate(const QuantumGame& game, const Profile& candidate, double radius,
                        std::size_t n_samples, Rng& rng);

/// Joint Frobenius distance sqrt(sum_i ||P_i - X_i||^2).
double profile_distance(const Profile& a, const Profile& b);

Profile uniform_profile(const QuantumGame& game);

}  // namespace qmmw
