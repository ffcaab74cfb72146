#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmmw/game.hpp"
#include "qmmw/learning.hpp"

namespace qmmw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

struct RunConfig {
  std::string game = "matching-pennies";  ///< builtin name or spec path
  std::string algo = "mmw";
  /// "theorem", "constant:gamma[,delta]" or "power:gamma0,p,delta0,q".
  std::string schedule = "theorem";
  std::size_t horizon = 1000;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::filesystem::path out = "qmmw-out";
  std::size_t stride = 0;
  /// "auto" (equilibrium if the game names one), "equilibrium", "uniform" or "none".
  std::string reference = "auto";
  std::size_t threads = 0;  ///< 0: hardware concurrency; never affects outputs
};

Schedule parse_schedule(const std::string& text, EstimatorKind kind, std::size_t horizon, const GameConstants& c,
                        double min_radius);

std::uint64_t fnv1a64(const std::string& bytes);

/// Everything that determines the output files; `threads` and `out` are excluded.
nlohmann::json build_manifest(const RunConfig& config, const QuantumGame& game);
/// Inverse of build_manifest. The game is rebuilt from the embedded spec.
RunConfig config_from_manifest(const nlohmann::json& manifest);

/// Runs seeds [0, seeds) on a worker pool; result k uses stream derive_stream_seed(base, k).
std::vector<Trajectory> run_seeds(const QuantumGame& game, EstimatorKind kind, const Schedule& schedule,
                                  std::size_t horizon, std::uint64_t base_seed, std::size_t seeds,
                                  const RunOptions& options, std::size_t threads);

int cmd_validate(const std::string& game_ref, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                     std::size_t threads, std::ostream& out, std::ostream& err);

struct EstimatorStatsConfig {
  std::string game = "matching-pennies";
  std::string algo = "3mw-2pe";
  std::vector<double> deltas{0.2, 0.1, 0.05};
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::string profile = "uniform";  ///< "uniform" or "equilibrium"
  std::optional<std::filesystem::path> out;  ///< CSV path; stdout when empty
};
int cmd_estimator_stats(const EstimatorStatsConfig& config, std::ostream& out, std::ostream& err);

struct VsConfig {
  RunConfig run;
  double threshold = 1e-2;
  double radius = 0.1;
  std::size_t certificate_samples = 10000;
  bool write_files = false;
};
int cmd_vs(const VsConfig& config, std::ostream& out, std::ostream& err);

int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// "%.17g"; empty for NaN.
std::string format_number(double x);

}  // namespace qmmw::cli
