#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmmw/errors.hpp"
#include "qmmw/fixtures.hpp"
#include "qmmw/game.hpp"
#include "test_util.hpp"

namespace qmmw {
namespace {

using test::pauli_z;

HermitianMatrix zz() { return HermitianMatrix(kron(pauli_z().matrix(), pauli_z().matrix())); }

bool has_violation(const ValidationReport& r, const std::string& what, double magnitude) {
  for (const auto& v : r.violations) {
    if (v.what == what && std::abs(v.magnitude - magnitude) < 1e-12) return true;
  }
  return false;
}

// Rank-one qubit state on the Bloch sphere.
DensityMatrix bloch_state(double theta, double phi) {
  const Complex psi[] = {std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi)};
  return DensityMatrix::pure(psi);
}

TEST(Validate, Fixtures) {
  for (auto name : fixtures::builtin_names()) {
    EXPECT_TRUE(validate(fixtures::builtin(name)).ok()) << name;
  }
  EXPECT_THROW(fixtures::builtin("no-such-game"), ValidationError);
}

TEST(Validate, Completeness) {
  std::vector<PovmOutcome> outcomes;
  for (const auto& p : fixtures::computational_pvm_2q()) outcomes.push_back({p * 1.5, {1.0, -1.0}});
  const auto r = validate(QuantumGame::from_povm({2, 2}, outcomes));
  EXPECT_TRUE(has_violation(r, "completeness", 0.5));

  outcomes.clear();
  for (const auto& p : fixtures::computational_pvm_2q()) outcomes.push_back({p * 0.9, {1.0, -1.0}});
  EXPECT_TRUE(has_violation(validate(QuantumGame::from_povm({2, 2}, outcomes)), "completeness", 0.1));
}

TEST(Validate, ZeroSumResidualAndNegativeElement) {
  const auto g = QuantumGame::from_observables({2, 2}, {zz(), zz()}, true);
  EXPECT_TRUE(has_violation(validate(g), "zero-sum residual", 2.0));

  auto pvm = fixtures::computational_pvm_2q();
  std::vector<PovmOutcome> outcomes{{pvm[0] * 2.0, {0, 0}}, {pvm[1], {0, 0}}, {pvm[2], {0, 0}},
                                    {pvm[3] - pvm[0], {0, 0}}};
  const auto r = validate(QuantumGame::from_povm({2, 2}, outcomes));
  EXPECT_TRUE(has_violation(r, "POVM element 3 is not PSD", 1.0));
}

TEST(Construction, Errors) {
  EXPECT_THROW(QuantumGame::from_observables({2}, {pauli_z()}), DimensionError);
  EXPECT_THROW(QuantumGame::from_observables({2, 2}, {zz()}), DimensionError);
  EXPECT_THROW(QuantumGame::from_observables({2, 3}, {zz(), zz()}), DimensionError);
}

TEST(Observables, FromPovm) {
  const auto mp = fixtures::matching_pennies();
  EXPECT_LT(frob_norm(mp.observables()[0] - zz()), 1e-15);
  EXPECT_LT(frob_norm(mp.observables()[1] + zz()), 1e-15);

  const auto c = fixtures::constant(2.5);
  if (c.form() == GameForm::kPovm) {
    for (const auto& w : observables_from_povm(c)) {
      EXPECT_LT(frob_norm(w - HermitianMatrix::identity(4) * 2.5), 1e-15);
    }
  }
  EXPECT_THROW(observables_from_povm(QuantumGame::from_observables({2, 2}, {zz(), zz()})), ValidationError);
}

TEST(Payoff, Examples) {
  const auto mp = fixtures::matching_pennies();
  const Profile x{DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1)};
  EXPECT_NEAR(payoff(mp, x, 0), -1.0, 1e-15);
  EXPECT_NEAR(payoff(mp, uniform_profile(mp), 0), 0.0, 1e-15);
  const auto id = QuantumGame::from_observables({2, 2}, {HermitianMatrix::identity(4), HermitianMatrix::identity(4)});
  EXPECT_NEAR(payoff(id, x, 1), 1.0, 1e-15);
  EXPECT_THROW(payoff(mp, Profile{DensityMatrix::maximally_mixed(2)}, 0), DimensionError);
  EXPECT_THROW(payoff(mp, Profile{DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(3)}, 0),
               DimensionError);
}

TEST(Payoff, PovmExpectationMatchesObservables) {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = test::random_povm_game(rng, {2, 2});
    const auto x = test::random_profile(rng, g);
    const auto probs = outcome_probabilities(g, x);
    for (std::size_t i = 0; i < 2; ++i) {
      double expected = 0.0;
      for (std::size_t k = 0; k < probs.size(); ++k) expected += probs[k] * g.outcomes()[k].payoffs[i];
      EXPECT_NEAR(payoff(g, x, i), expected, 1e-10);
    }
  }
}

TEST(Gradient, Examples) {
  const auto mp = fixtures::matching_pennies();
  const Profile half{DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)};
  EXPECT_LT(frob_norm(gradient(mp, half, 0)), 1e-15);
  const Profile pure{DensityMatrix::maximally_mixed(2), DensityMatrix::basis_state(2, 0)};
  EXPECT_LT(frob_norm(gradient(mp, pure, 0) - pauli_z()), 1e-15);
  const auto c = fixtures::constant(3.0);
  for (const auto& v : gradients(c, half)) EXPECT_LT(frob_norm(v - HermitianMatrix::identity(2) * 3.0), 1e-14);
}

TEST(Gradient, ConsistencyLinearityZeroSum) {
  Rng rng(32);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = test::random_observable_game(rng, {2, 3}, true);
    const auto x = test::random_profile(rng, g);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(trace_product(gradient(g, x, i), x[i].hermitian()), payoff(g, x, i), 1e-10);
    }
    // V_1 is affine in X_2: V_1(t a + (1-t) b) = t V_1(a) + (1-t) V_1(b).
    const auto a = random_density(rng, 3);
    const auto b = random_density(rng, 3);
    const double t = rng.uniform01();
    const DensityMatrix mix(a.hermitian() * t + b.hermitian() * (1.0 - t));
    const auto lhs = gradient(g, Profile{x[0], mix}, 0);
    const auto rhs = gradient(g, Profile{x[0], a}, 0) * t + gradient(g, Profile{x[0], b}, 0) * (1.0 - t);
    EXPECT_LT(frob_norm(lhs - rhs), 1e-10);
    // Zero-sum: W_2 = -W_1 so u_2 = -u_1 everywhere.
    EXPECT_NEAR(payoff(g, x, 0), -payoff(g, x, 1), 1e-12);
  }
}

TEST(Gradient, ThreePlayers) {
  Rng rng(33);
  const auto g = test::random_observable_game(rng, {2, 2, 2}, false);
  const auto x = test::random_profile(rng, g);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(trace_product(gradient(g, x, i), x[i].hermitian()), payoff(g, x, i), 1e-10);
  }
}

TEST(SampleOutcome, UniformAndPure) {
  const auto mp = fixtures::matching_pennies();
  Rng rng(41);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++counts[sample_outcome(rng, mp, uniform_profile(mp))];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.01);

  const Profile zero{DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 0)};
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(sample_outcome(rng, mp, zero), 0U);
}

TEST(SampleOutcome, RandomPovmFrequencies) {
  Rng rng(42);
  const auto g = test::random_povm_game(rng, {2, 2});
  const auto x = test::random_profile(rng, g);
  const auto probs = outcome_probabilities(g, x);
  const int n = 100000;
  std::vector<int> counts(probs.size(), 0);
  for (int k = 0; k < n; ++k) ++counts[sample_outcome(rng, g, x)];
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double sigma = std::sqrt(probs[k] * (1.0 - probs[k]) / n);
    EXPECT_NEAR(static_cast<double>(counts[k]) / n, probs[k], 3.0 * sigma + 1e-12);
  }
}

TEST(SampleOutcome, IncompletePovmRejected) {
  std::vector<PovmOutcome> outcomes;
  for (const auto& p : fixtures::computational_pvm_2q()) outcomes.push_back({p * 0.9, {1.0, -1.0}});
  const auto g = QuantumGame::from_povm({2, 2}, outcomes);
  Rng rng(1);
  EXPECT_THROW(sample_outcome(rng, g, uniform_profile(g)), ValidationError);
}

TEST(DualityGap, Examples) {
  const auto mp = fixtures::matching_pennies();
  EXPECT_NEAR(duality_gap(mp, uniform_profile(mp)), 0.0, 1e-15);
  const Profile x{DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)};
  EXPECT_NEAR(duality_gap(mp, x), 1.0, 1e-15);
  EXPECT_THROW(duality_gap(fixtures::dominant(), uniform_profile(mp)), ValidationError);

  const auto sk = fixtures::skewed_pennies();
  EXPECT_NEAR(duality_gap(sk, *sk.equilibrium()), 0.0, 1e-12);
  EXPECT_NEAR(duality_gap(sk, uniform_profile(sk)), 0.5, 1e-12);
}

TEST(DualityGap, BestResponseMatchesBlochGrid) {
  Rng rng(51);
  const auto g = test::random_observable_game(rng, {2, 2}, true);
  const auto x = test::random_profile(rng, g);
  const auto v = gradient(g, x, 0);
  double best = -1e300;
  for (int k = 0; k < 10000; ++k) {
    const double theta = std::acos(2.0 * rng.uniform01() - 1.0);
    const double phi = 2.0 * std::numbers::pi * rng.uniform01();
    best = std::max(best, trace_product(v, bloch_state(theta, phi).hermitian()));
  }
  EXPECT_NEAR(best, lambda_max(v), 1e-3);
  EXPECT_LE(best, lambda_max(v) + 1e-12);
}

TEST(DualityGap, NonNegativeOnRandomZeroSumGames) {
  Rng rng(52);
  for (int rep = 0; rep < 200; ++rep) {
    const auto g = test::random_observable_game(rng, {2, 3}, true);
    EXPECT_GE(duality_gap(g, test::random_profile(rng, g)), -1e-9);
  }
}

TEST(Constants, Fixtures) {
  const auto mp = constants(fixtures::matching_pennies());
  EXPECT_DOUBLE_EQ(mp.B, 1.0);
  EXPECT_NEAR(mp.hmax, std::log(4.0), 1e-15);
  EXPECT_NEAR(mp.L.analytic, 2.0, 1e-12);
  EXPECT_NEAR(mp.L2.analytic, 2.0, 1e-12);
  EXPECT_EQ(mp.D, (std::vector<std::size_t>{3, 3}));
  EXPECT_DOUBLE_EQ(mp.K, 1.0);

  const auto sk = constants(fixtures::skewed_pennies());
  EXPECT_NEAR(sk.L.analytic, 2.0, 1e-12);
  EXPECT_NEAR(sk.L2.analytic, std::sqrt(3.0), 1e-12);

  const auto dom = constants(fixtures::dominant());
  EXPECT_DOUBLE_EQ(dom.B, 0.5);
  EXPECT_NEAR(dom.L.analytic, 1.0, 1e-12);
  EXPECT_NEAR(dom.L2.analytic, 1.0, 1e-12);
}

TEST(Constants, EmpiricalBelowAnalytic) {
  Rng rng(61);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto g = test::random_observable_game(rng, {2, 2}, rep % 2 == 0);
    const auto c = constants(g, rng, 3);
    EXPECT_LE(*c.L.empirical, c.L.analytic + 1e-12);
    EXPECT_LE(*c.L2.empirical, c.L2.analytic + 1e-12);
  }
}

TEST(Constants, ConstantGameHasZeroEmpiricalSmoothness) {
  Rng rng(62);
  const auto c = constants(fixtures::constant(1.0), rng, 200);
  EXPECT_LT(*c.L2.empirical, 1e-12);
  EXPECT_LE(*c.L.empirical, c.L.analytic + 1e-12);
}

TEST(VsCertificate, DominantPassesMatchingPenniesFails) {
  Rng rng(71);
  const auto dom = fixtures::dominant();
  const auto good = vs_certificate(dom, *dom.equilibrium(), 0.1, 10000, rng);
  EXPECT_TRUE(good.plausible);
  EXPECT_LT(good.max_term, -1e-10);

  const auto mp = fixtures::matching_pennies();
  const auto bad = vs_certificate(mp, *mp.equilibrium(), 0.1, 2000, rng);
  EXPECT_FALSE(bad.plausible);
}

}  // namespace
}  // namespace qmmw
