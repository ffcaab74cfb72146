#include "game_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qmmw/errors.hpp"
#include "qmmw/fixtures.hpp"

namespace qmmw::cli {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("game spec: missing field '") + key + "'");
  return doc.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + ": expected a number");
  return j.get<double>();
}

std::string residual_text(double r) {
  std::ostringstream os;
  os.precision(3);
  os << r;
  return os.str();
}

// Hermitian wrapper that records a named finding instead of throwing.
std::optional<HermitianMatrix> hermitian_or_finding(const ComplexMatrix& m, const std::string& what,
                                                    ValidationReport& findings) {
  const double residual = m.hermiticity_residual();
  if (residual > kHermitianTolerance) {
    findings.violations.push_back({what + " is not Hermitian (residual " + residual_text(residual) + ")", residual});
    return std::nullopt;
  }
  return HermitianMatrix(m);
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    // + 0.0 maps -0.0 to 0.0 so that re-serialized specs hash identically.
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(json::array({m(i, j).real() + 0.0, m(i, j).imag() + 0.0}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ValidationError(what + ": expected a non-empty array of rows");
  const std::size_t n = j.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != n) {
      throw ValidationError(what + ": row " + std::to_string(i) + " does not have " + std::to_string(n) + " entries");
    }
    for (std::size_t k = 0; k < n; ++k) {
      const auto& z = row[k];
      if (z.is_number()) {
        entries.emplace_back(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2) {
        entries.emplace_back(number(z[0], what), number(z[1], what));
      } else {
        throw ValidationError(what + ": entry (" + std::to_string(i) + "," + std::to_string(k) +
                              ") must be [re, im]");
      }
    }
  }
  return ComplexMatrix(n, std::move(entries));
}

GameSpecParse parse_game_spec(const json& doc) {
  if (!doc.is_object()) throw ValidationError("game spec: expected a JSON object");
  GameSpecParse out;

  std::vector<std::size_t> dims;
  const auto& players = require(doc, "players");
  if (!players.is_array()) throw ValidationError("game spec: 'players' must be a list of dimensions");
  for (const auto& d : players) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw ValidationError("game spec: player dimensions must be positive integers");
    }
    dims.push_back(d.get<std::size_t>());
  }
  const std::string form = require(doc, "form").get<std::string>();
  const bool zero_sum = doc.value("zero_sum", false);

  std::optional<QuantumGame> game;
  if (form == "povm") {
    const auto& povm = require(doc, "povm");
    if (!povm.is_array()) throw ValidationError("game spec: 'povm' must be a list of outcomes");
    std::vector<PovmOutcome> outcomes;
    bool ok = true;
    for (std::size_t k = 0; k < povm.size(); ++k) {
      const std::string name = "povm[" + std::to_string(k) + "].element";
      const auto m = matrix_from_json(require(povm[k], "element"), name);
      auto h = hermitian_or_finding(m, name, out.findings);
      std::vector<double> pay;
      for (const auto& u : require(povm[k], "payoffs")) pay.push_back(number(u, "povm[" + std::to_string(k) + "].payoffs"));
      if (!h) {
        ok = false;
        continue;
      }
      outcomes.push_back({std::move(*h), std::move(pay)});
    }
    if (ok) game = QuantumGame::from_povm(dims, std::move(outcomes), zero_sum);
  } else if (form == "observables") {
    const auto& obs = require(doc, "observables");
    if (!obs.is_array()) throw ValidationError("game spec: 'observables' must be a list of matrices");
    std::vector<HermitianMatrix> ws;
    bool ok = true;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string name = "observables[" + std::to_string(i) + "] (W_" + std::to_string(i + 1) + ")";
      auto h = hermitian_or_finding(matrix_from_json(obs[i], name), name, out.findings);
      if (!h) {
        ok = false;
        continue;
      }
      ws.push_back(std::move(*h));
    }
    if (ok) game = QuantumGame::from_observables(dims, std::move(ws), zero_sum);
  } else {
    throw ValidationError("game spec: form must be \"povm\" or \"observables\", got \"" + form + "\"");
  }

  if (game) {
    if (doc.contains("name")) game->set_name(doc.at("name").get<std::string>());
    if (doc.contains("equilibrium")) {
      Profile eq;
      bool ok = true;
      const auto& e = doc.at("equilibrium");
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string name = "equilibrium[" + std::to_string(i) + "]";
        auto h = hermitian_or_finding(matrix_from_json(e[i], name), name, out.findings);
        if (!h) {
          ok = false;
          continue;
        }
        try {
          eq.emplace_back(std::move(*h));
        } catch (const ValidationError& err) {
          out.findings.violations.push_back({name + ": " + err.what(), 0.0});
          ok = false;
        }
      }
      if (ok) game->set_equilibrium(std::move(eq));
    }
  }
  out.game = std::move(game);
  return out;
}

GameSpecParse load_game_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open game spec '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("game spec '" + path.string() + "': " + e.what());
  }
  return parse_game_spec(doc);
}

json game_to_json(const QuantumGame& game) {
  json doc;
  if (!game.name().empty()) doc["name"] = game.name();
  doc["players"] = game.dims();
  doc["zero_sum"] = game.zero_sum();
  if (game.form() == GameForm::kPovm) {
    doc["form"] = "povm";
    json povm = json::array();
    for (const auto& o : game.outcomes()) {
      povm.push_back({{"element", matrix_to_json(o.element.matrix())}, {"payoffs", o.payoffs}});
    }
    doc["povm"] = std::move(povm);
  } else {
    doc["form"] = "observables";
    json obs = json::array();
    for (const auto& w : game.observables()) obs.push_back(matrix_to_json(w.matrix()));
    doc["observables"] = std::move(obs);
  }
  if (const auto& eq = game.equilibrium()) {
    json e = json::array();
    for (const auto& x : *eq) e.push_back(matrix_to_json(x.matrix()));
    doc["equilibrium"] = std::move(e);
  }
  return doc;
}

QuantumGame resolve_game(const std::string& ref) {
  constexpr std::string_view prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) return fixtures::builtin(ref.substr(prefix.size()));
  for (auto name : fixtures::builtin_names()) {
    if (ref == name) return fixtures::builtin(name);
  }
  auto parsed = load_game_spec(ref);
  if (!parsed.game) {
    std::string msg = "game spec '" + ref + "' is invalid:";
    for (const auto& v : parsed.findings.violations) msg += " " + v.what + ";";
    throw ValidationError(msg);
  }
  return std::move(*parsed.game);
}

}  // namespace qmmw::cli
