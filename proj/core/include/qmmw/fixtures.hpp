#pragma once

// Canonical two-qubit games.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmmw/game.hpp"

namespace qmmw::fixtures {

/// Computational-basis measurement, u_1 = +1 on equal bits and -1 otherwise,
/// u_2 = -u_1. W_1 = Z (x) Z; equilibrium (I/2, I/2).
QuantumGame matching_pennies();

/// Zero-sum game with payoff matrix [[1, -1], [-1, 0]] for player 1, who is
/// measured in the computational basis while player 2 is measured in the
/// Hadamard basis. The equilibrium puts weight (1/3, 2/3) on each player's
/// measurement basis, so it is neither the maximally mixed state nor diagonal
/// for player 2.
QuantumGame skewed_pennies();

/// Each player earns +1/2 when the own qubit reads 0 and -1/2 otherwise,
/// independently of the opponent. Strict pure equilibrium (|0><0|, |0><0|).
QuantumGame dominant();

/// Every outcome pays `value` to both players.
QuantumGame constant(double value = 1.0);

/// Two-qubit computational-basis projectors |ab><ab| in the order 00, 01, 10, 11.
std::vector<HermitianMatrix> computational_pvm_2q();

/// |psi><psi| on the product space for factors given as state vectors.
HermitianMatrix product_projector(std::span<const std::vector<Complex>> factors);

std::vector<std::string_view> builtin_names();
/// Throws ValidationError for an unknown name.
QuantumGame builtin(std::string_view name);

}  // namespace qmmw::fixtures
