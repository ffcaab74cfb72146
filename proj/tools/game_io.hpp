#pragma once

// JSON game specification files.
//
//   {
//     "name": "optional",
//     "players": [2, 2],
//     "form": "povm" | "observables",
//     "zero_sum": false,
//     "povm": [{"element": M, "payoffs": [u_1, ..., u_N]}, ...],
//     "observables": [M_1, ..., M_N],
//     "equilibrium": [M_1, ..., M_N]
//   }
//
// A matrix M is a row-major nested array of [re, im] pairs on the full
// product space (players' factors for "equilibrium").

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qmmw/game.hpp"

namespace qmmw::cli {

struct GameSpecParse {
  std::optional<QuantumGame> game;  ///< empty when a finding prevents construction
  ValidationReport findings;        ///< structural findings (e.g. a non-Hermitian matrix, by name)
};

/// Throws ValidationError for malformed documents (missing fields, ragged arrays).
GameSpecParse parse_game_spec(const nlohmann::json& doc);
GameSpecParse load_game_spec(const std::filesystem::path& path);

nlohmann::json game_to_json(const QuantumGame& game);

/// "builtin:<name>", a bare builtin name, or a path to a spec file. Throws
/// ValidationError when the spec cannot be turned into a game.
QuantumGame resolve_game(const std::string& ref);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
/// Throws ValidationError when `j` is not a square array of [re, im] pairs.
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace qmmw::cli
