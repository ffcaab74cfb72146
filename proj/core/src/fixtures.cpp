#include "qmmw/fixtures.hpp"

#include <cmath>
#include <string>

#include "qmmw/errors.hpp"

namespace qmmw::fixtures {

namespace {

using Vec = std::vector<Complex>;

const Vec kZero{1.0, 0.0};
const Vec kOne{0.0, 1.0};

Vec plus() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
Vec minus() { return {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}; }

Profile qubit_profile(const DensityMatrix& a, const DensityMatrix& b) { return Profile{a, b}; }

}  // namespace

HermitianMatrix product_projector(std::span<const std::vector<Complex>> factors) {
  Vec psi{1.0};
  for (const auto& f : factors) {
    Vec next(psi.size() * f.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = psi[i] * f[j];
    }
    psi = std::move(next);
  }
  return DensityMatrix::pure(psi).hermitian();
}

std::vector<HermitianMatrix> computational_pvm_2q() {
  std::vector<HermitianMatrix> out;
  for (const Vec* a : {&kZero, &kOne}) {
    for (const Vec* b : {&kZero, &kOne}) {
      const std::vector<Vec> f{*a, *b};
      out.push_back(product_projector(f));
    }
  }
  return out;
}

QuantumGame matching_pennies() {
  const auto pvm = computational_pvm_2q();
  const double u1[4] = {1.0, -1.0, -1.0, 1.0};
  std::vector<PovmOutcome> outcomes;
  for (std::size_t k = 0; k < 4; ++k) outcomes.push_back({pvm[k], {u1[k], -u1[k]}});
  auto game = QuantumGame::from_povm({2, 2}, std::move(outcomes), true);
  game.set_name("matching-pennies");
  game.set_equilibrium(qubit_profile(DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)));
  return game;
}

QuantumGame skewed_pennies() {
  const double a[2][2] = {{1.0, -1.0}, {-1.0, 0.0}};
  const Vec row[2] = {kZero, kOne};
  const Vec col[2] = {plus(), minus()};
  std::vector<PovmOutcome> outcomes;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::vector<Vec> f{row[i], col[j]};
      outcomes.push_back({product_projector(f), {a[i][j], -a[i][j]}});
    }
  }
  auto game = QuantumGame::from_povm({2, 2}, std::move(outcomes), true);
  game.set_name("skewed-pennies");

  const double w0 = 1.0 / 3.0;
  const double w1 = 2.0 / 3.0;
  const std::vector<double> diag{w0, w1};
  const DensityMatrix x1(HermitianMatrix::diagonal(diag));
  const auto p = DensityMatrix::pure(plus()).hermitian();
  const auto m = DensityMatrix::pure(minus()).hermitian();
  const DensityMatrix x2(p * w0 + m * w1);
  game.set_equilibrium(qubit_profile(x1, x2));
  return game;
}

QuantumGame dominant() {
  const auto pvm = computational_pvm_2q();
  std::vector<PovmOutcome> outcomes;
  for (std::size_t k = 0; k < 4; ++k) {
    const double own1 = (k >> 1) == 0 ? 0.5 : -0.5;
    const double own2 = (k & 1U) == 0 ? 0.5 : -0.5;
    outcomes.push_back({pvm[k], {own1, own2}});
  }
  auto game = QuantumGame::from_povm({2, 2}, std::move(outcomes), false);
  game.set_name("dominant");
  game.set_equilibrium(qubit_profile(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 0)));
  return game;
}

QuantumGame constant(double value) {
  const auto pvm = computational_pvm_2q();
  std::vector<PovmOutcome> outcomes;
  for (const auto& p : pvm) outcomes.push_back({p, {value, value}});
  auto game = QuantumGame::from_povm({2, 2}, std::move(outcomes), false);
  game.set_name("constant");
  return game;
}

std::vector<std::string_view> builtin_names() {
  return {"matching-pennies", "skewed-pennies", "dominant", "constant"};
}

QuantumGame builtin(std::string_view name) {
  if (name == "matching-pennies") return matching_pennies();
  if (name == "skewed-pennies") return skewed_pennies();
  if (name == "dominant") return dominant();
  if (name == "constant") return constant();
  throw ValidationError("unknown builtin game '" + std::string(name) + "'");
}

}  // namespace qmmw::fixtures
