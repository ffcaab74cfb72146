#include "qmmw/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qmmw/errors.hpp"
#include "qmmw/random_matrices.hpp"

namespace qmmw {

namespace {

std::size_t product_of(const std::vector<std::size_t>& dims) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("QuantumGame: player dimension must be positive");
    total *= d;
  }
  return total;
}

void require_players(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw DimensionError("QuantumGame: at least two players are required");
}

double vector_norm(const std::vector<HermitianMatrix>& v) {
  double sum = 0.0;
  for (const auto& m : v) {
    const double n = frob_norm(m);
    sum += n * n;
  }
  return std::sqrt(sum);
}

}  // namespace

std::size_t GameConstants::D_max() const { return D.empty() ? 0 : *std::max_element(D.begin(), D.end()); }

QuantumGame QuantumGame::from_povm(std::vector<std::size_t> dims, std::vector<PovmOutcome> outcomes,
                                   bool zero_sum) {
  require_players(dims);
  QuantumGame g;
  g.product_dim_ = product_of(dims);
  g.dims_ = std::move(dims);
  g.form_ = GameForm::kPovm;
  g.zero_sum_ = zero_sum;
  if (outcomes.empty()) throw DimensionError("QuantumGame: POVM has no outcomes");
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].element.dim() != g.product_dim_) {
      throw DimensionError("QuantumGame: POVM element " + std::to_string(k) + " has dimension " +
                           std::to_string(outcomes[k].element.dim()) + ", expected " +
                           std::to_string(g.product_dim_));
    }
    if (outcomes[k].payoffs.size() != g.dims_.size()) {
      throw DimensionError("QuantumGame: outcome " + std::to_string(k) + " needs one payoff per player");
    }
  }
  g.outcomes_ = std::move(outcomes);
  g.observables_.assign(g.dims_.size(), HermitianMatrix::zero(g.product_dim_));
  for (const auto& o : g.outcomes_) {
    for (std::size_t i = 0; i < g.dims_.size(); ++i) {
      if (o.payoffs[i] != 0.0) g.observables_[i] += o.element * o.payoffs[i];
    }
  }
  return g;
}

QuantumGame QuantumGame::from_observables(std::vector<std::size_t> dims, std::vector<HermitianMatrix> observables,
                                          bool zero_sum) {
  require_players(dims);
  QuantumGame g;
  g.product_dim_ = product_of(dims);
  g.dims_ = std::move(dims);
  g.form_ = GameForm::kObservables;
  g.zero_sum_ = zero_sum;
  if (observables.size() != g.dims_.size()) {
    throw DimensionError("QuantumGame: expected one payoff observable per player");
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (observables[i].dim() != g.product_dim_) {
      throw DimensionError("QuantumGame: observable W_" + std::to_string(i + 1) + " has wrong dimension");
    }
  }
  g.observables_ = std::move(observables);
  return g;
}

QuantumGame& QuantumGame::set_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

QuantumGame& QuantumGame::set_equilibrium(Profile eq) {
  check_profile(*this, eq);
  equilibrium_ = std::move(eq);
  return *this;
}

ValidationReport validate(const QuantumGame& game) {
  ValidationReport report;
  auto add = [&](std::string what, double magnitude) { report.violations.push_back({std::move(what), magnitude}); };

  for (std::size_t i = 0; i < game.observables().size(); ++i) {
    if (!game.observables()[i].is_finite()) add("W_" + std::to_string(i + 1) + " has non-finite entries", 0.0);
  }

  if (game.form() == GameForm::kPovm) {
    HermitianMatrix sum = HermitianMatrix::zero(game.product_dim());
    for (std::size_t k = 0; k < game.outcomes().size(); ++k) {
      const auto& o = game.outcomes()[k];
      for (double u : o.payoffs) {
        if (!std::isfinite(u)) add("outcome " + std::to_string(k) + ": non-finite payoff", 0.0);
      }
      const double lo = lambda_min(o.element);
      if (lo < -kCompletenessTolerance) add("POVM element " + std::to_string(k) + " is not PSD", -lo);
      sum += o.element;
    }
    const double completeness = operator_norm(sum - HermitianMatrix::identity(game.product_dim()));
    if (completeness > kCompletenessTolerance) add("completeness", completeness);
  }

  if (game.zero_sum()) {
    if (game.players() != 2) {
      add("zero-sum flag requires exactly two players", static_cast<double>(game.players()));
    } else {
      const double residual = operator_norm(game.observables()[0] + game.observables()[1]);
      if (residual > kZeroSumTolerance) add("zero-sum residual", residual);
    }
  }

  if (const auto& eq = game.equilibrium()) {
    if (eq->size() != game.players()) add("equilibrium candidate has wrong number of players", 0.0);
  }
  return report;
}

std::vector<HermitianMatrix> observables_from_povm(const QuantumGame& game) {
  if (game.form() != GameForm::kPovm) {
    throw ValidationError("observables_from_povm: game is given in observable form");
  }
  return game.observables();
}

void check_profile(const QuantumGame& game, const Profile& profile) {
  if (profile.size() != game.players()) {
    throw DimensionError("profile has " + std::to_string(profile.size()) + " players, game has " +
                         std::to_string(game.players()));
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].dim() != game.dims()[i]) {
      throw DimensionError("profile entry " + std::to_string(i + 1) + " has dimension " +
                           std::to_string(profile[i].dim()) + ", expected " + std::to_string(game.dims()[i]));
    }
  }
}

double payoff(const QuantumGame& game, const Profile& profile, std::size_t player) {
  check_profile(game, profile);
  if (player >= game.players()) throw DimensionError("payoff: player index out of range");
  return trace_product(game.observables()[player], kron(profile));
}

std::vector<double> payoffs(const QuantumGame& game, const Profile& profile) {
  check_profile(game, profile);
  const auto joint = kron(profile);
  std::vector<double> out(game.players());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = trace_product(game.observables()[i], joint);
  return out;
}

HermitianMatrix gradient(const QuantumGame& game, const Profile& profile, std::size_t player) {
  check_profile(game, profile);
  if (player >= game.players()) throw DimensionError("gradient: player index out of range");
  return partial_contraction(game.observables()[player], std::span<const DensityMatrix>(profile), player);
}

std::vector<HermitianMatrix> gradients(const QuantumGame& game, const Profile& profile) {
  std::vector<HermitianMatrix> out;
  out.reserve(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) out.push_back(gradient(game, profile, i));
  return out;
}

std::vector<double> outcome_probabilities(const QuantumGame& game, const Profile& profile) {
  if (game.form() != GameForm::kPovm) {
    throw ValidationError("outcome sampling requires a POVM-form game");
  }
  check_profile(game, profile);
  const auto joint = kron(profile);
  std::vector<double> probs(game.outcomes().size());
  double raw = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    probs[k] = trace_product(game.outcomes()[k].element, joint);
    raw += probs[k];
  }
  if (!(std::abs(raw - 1.0) < kOutcomeMassTolerance)) {
    throw ValidationError("outcome probabilities sum to " + std::to_string(raw) + "; POVM is not complete");
  }
  double clamped = 0.0;
  for (auto& p : probs) {
    p = std::clamp(p, 0.0, 1.0);
    clamped += p;
  }
  for (auto& p : probs) p /= clamped;
  return probs;
}

std::size_t sample_outcome(Rng& rng, const QuantumGame& game, const Profile& profile) {
  const auto probs = outcome_probabilities(game, profile);
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    cumulative += probs[k];
    if (u < cumulative) return k;
  }
  return last_positive;
}

double duality_gap(const QuantumGame& game, const Profile& profile) {
  if (game.players() != 2 || !game.zero_sum()) {
    throw ValidationError("duality_gap: defined for two-player zero-sum games only");
  }
  return lambda_max(gradient(game, profile, 0)) + lambda_max(gradient(game, profile, 1));
}

GameConstants constants(const QuantumGame& game) {
  GameConstants c;
  const std::size_t n = game.players();
  const auto& dims = game.dims();

  if (game.form() == GameForm::kPovm) {
    for (const auto& o : game.outcomes()) {
      for (double u : o.payoffs) c.B = std::max(c.B, std::abs(u));
    }
  } else {
    for (const auto& w : game.observables()) c.B = std::max(c.B, operator_norm(w));
  }

  // ||V_i||_F <= ||W_i||_F (Cauchy-Schwarz against a unit-Frobenius product
  // density) and ||V_i||_F <= sqrt(d_i) ||V_i||_op <= sqrt(d_i) ||W_i||_op.
  double l_squared = 0.0;
  double smooth = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = game.observables()[i];
    const double op = operator_norm(w);
    const double fro = frob_norm(w);
    const double di = static_cast<double>(dims[i]);
    const double li = std::min(std::sqrt(di) * op, fro);
    l_squared += li * li;

    // Changing X_j moves V_i by at most c_ij ||X_j - X'_j||_F.
    std::size_t widest_other = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) widest_other = std::max(widest_other, dims[j]);
    }
    const double cij = std::min(fro, std::sqrt(di * static_cast<double>(widest_other)) * op);
    smooth = std::max(smooth, cij);
  }
  c.L.analytic = std::sqrt(l_squared);
  c.L2.analytic = static_cast<double>(n - 1) * smooth;
  c.K = 1.0;
  for (std::size_t d : dims) {
    c.hmax += std::log(static_cast<double>(d));
    c.D.push_back(d * d - 1);
  }
  return c;
}

GameConstants constants(const QuantumGame& game, Rng& rng, std::size_t n_samples) {
  GameConstants c = constants(game);
  auto draw = [&] {
    Profile p;
    p.reserve(game.players());
    for (std::size_t d : game.dims()) p.push_back(random_density_mixed_rank(rng, d));
    return p;
  };
  double l_emp = 0.0;
  double l2_emp = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Profile x = draw();
    const Profile y = draw();
    const auto vx = gradients(game, x);
    const auto vy = gradients(game, y);
    l_emp = std::max(l_emp, vector_norm(vx));
    const double dist = profile_distance(x, y);
    if (dist > 1e-9) {
      std::vector<HermitianMatrix> diff;
      for (std::size_t i = 0; i < vx.size(); ++i) diff.push_back(vx[i] - vy[i]);
      l2_emp = std::max(l2_emp, vector_norm(diff) / dist);
    }
  }
  c.L.empirical = l_emp;
  c.L2.empirical = l2_emp;
  return c;
}

VsReport vs_certificate(const QuantumGame& game, const Profile& candidate, double radius,
                        std::size_t n_samples, Rng& rng) {
  if (!(radius > 0.0)) throw ValidationError("vs_certificate: radius must be positive");
  check_profile(game, candidate);
  VsReport report;
  report.max_term = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Profile target;
    for (std::size_t d : game.dims()) target.push_back(random_density_mixed_rank(rng, d));
    const double dist = profile_distance(target, candidate);
    const double scale = dist > 0.0 ? std::min(1.0, radius * rng.uniform01() / dist) : 0.0;
    if (scale * dist < 1e-9) {
      ++report.degenerate;
      continue;
    }
    Profile x;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      x.push_back(DensityMatrix(candidate[i].hermitian() * (1.0 - scale) + target[i].hermitian() * scale));
    }
    const auto v = gradients(game, x);
    double term = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) term += trace_product(v[i], x[i].hermitian() - candidate[i].hermitian());
    report.max_term = std::max(report.max_term, term);
    if (term >= -1e-10) ++violations;
    ++report.samples;
  }
  report.violation_fraction =
      report.samples > 0 ? static_cast<double>(violations) / static_cast<double>(report.samples) : 0.0;
  report.plausible = report.samples > 0 && report.max_term < -1e-10;
  return report;
}

double profile_distance(const Profile& a, const Profile& b) {
  if (a.size() != b.size()) throw DimensionError("profile_distance: player count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double n = frob_norm(a[i].hermitian() - b[i].hermitian());
    sum += n * n;
  }
  return std::sqrt(sum);
}

Profile uniform_profile(const QuantumGame& game) {
  Profile p;
  p.reserve(game.players());
  for (std::size_t d : game.dims()) p.push_back(DensityMatrix::maximally_mixed(d));
  return p;
}

}  // namespace qmmw
