#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <variant>

#include "game_io.hpp"
#include "qmmw/analysis.hpp"
#include "qmmw/errors.hpp"
#include "qmmw/fixtures.hpp"
#include "qmmw/rng.hpp"
#include "qmmw/version.hpp"

namespace qmmw::cli {

namespace {

using nlohmann::json;

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
    if (used != item.size()) throw ValidationError("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::optional<Profile> resolve_reference(const std::string& mode, const QuantumGame& game) {
  if (mode == "none") return std::nullopt;
  if (mode == "uniform") return uniform_profile(game);
  if (mode == "equilibrium") {
    if (!game.equilibrium()) throw ValidationError("game has no equilibrium candidate");
    return game.equilibrium();
  }
  if (mode == "auto") return game.equilibrium();
  throw ValidationError("unknown reference '" + mode + "' (expected auto, equilibrium, uniform or none)");
}

double schedule_min_radius(EstimatorKind kind, const QuantumGame& game) {
  if (kind == EstimatorKind::kFullInfo) return std::numeric_limits<double>::infinity();
  return min_radius(player_geometry(game));
}

// delta_t stays in (0, r) for t in [1, T] iff it does at both ends (monotone in t).
void check_feasible(const Schedule& s, EstimatorKind kind, std::size_t horizon, double radius) {
  if (kind == EstimatorKind::kFullInfo) return;
  for (std::size_t t : {std::size_t{1}, horizon}) {
    const double d = s.delta(t);
    if (!(d > 0.0 && d < radius)) {
      throw ScheduleError("sampling radius " + format_number(d) + " at t=" + std::to_string(t) +
                          " is outside (0, " + format_number(radius) + ")");
    }
  }
}

void write_seed_csv(const std::filesystem::path& path, const Trajectory& traj, std::size_t players) {
  std::ofstream f(path, std::ios::binary);
  f << "t,gap,bregman";
  for (std::size_t i = 0; i < players; ++i) f << ",payoff_" << (i + 1);
  f << ",energy_residual,delta_t,gamma_t\n";
  for (const auto& r : traj.records) {
    f << r.t << ',' << (r.gap ? format_number(*r.gap) : "") << ',' << (r.bregman ? format_number(*r.bregman) : "");
    for (double u : r.payoffs) f << ',' << format_number(u);
    f << ',' << format_number(r.energy_residual) << ',' << format_number(r.delta) << ',' << format_number(r.gamma)
      << '\n';
  }
}

Series column(const Trajectory& traj, bool gap) {
  Series s;
  for (const auto& r : traj.records) {
    const auto& v = gap ? r.gap : r.bregman;
    if (!v) return {};
    s.t.push_back(static_cast<double>(r.t));
    s.values.push_back(*v);
  }
  return s;
}

std::vector<BandPoint> bands(const std::vector<Trajectory>& runs, bool gap) {
  std::vector<Series> series;
  for (const auto& r : runs) {
    auto s = column(r, gap);
    if (s.t.empty()) return {};
    series.push_back(std::move(s));
  }
  return aggregate(series);
}

struct Outputs {
  std::vector<BandPoint> gap;
  std::vector<BandPoint> bregman;
  std::optional<RateFit> fit;
  std::size_t fit_from = 0;
};

Outputs write_outputs(const std::filesystem::path& dir, const std::vector<Trajectory>& runs, const QuantumGame& game,
                      EstimatorKind kind, const GameConstants& c) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "seed_%04zu.csv", k);
    write_seed_csv(dir / name, runs[k], game.players());
  }

  Outputs o;
  o.gap = bands(runs, true);
  o.bregman = bands(runs, false);
  const bool has_gap = !o.gap.empty();
  const bool has_breg = !o.bregman.empty();

  std::ofstream f(dir / "summary.csv", std::ios::binary);
  f << "t,gap_mean,gap_median,gap_q10,gap_q90,bregman_mean,bregman_median,bregman_q10,bregman_q90,bound\n";
  const std::size_t rows = runs.empty() ? 0 : runs.front().records.size();
  for (std::size_t k = 0; k < rows; ++k) {
    const double t = static_cast<double>(runs.front().records[k].t);
    f << runs.front().records[k].t;
    if (has_gap) {
      f << ',' << format_number(o.gap[k].mean) << ',' << format_number(o.gap[k].median) << ','
        << format_number(o.gap[k].q10) << ',' << format_number(o.gap[k].q90);
    } else {
      f << ",,,,";
    }
    if (has_breg) {
      f << ',' << format_number(o.bregman[k].mean) << ',' << format_number(o.bregman[k].median) << ','
        << format_number(o.bregman[k].q10) << ',' << format_number(o.bregman[k].q90);
    } else {
      f << ",,,,";
    }
    f << ',' << (has_gap ? format_number(theorem_bound(kind, t, c)) : "") << '\n';
  }

  std::ofstream fit(dir / "fit.csv", std::ios::binary);
  fit << "series,t_from,t_to,points,slope,intercept,r_squared\n";
  if (has_gap) {
    Series mean;
    for (const auto& b : o.gap) {
      mean.t.push_back(b.t);
      mean.values.push_back(b.mean);
    }
    const Series tail = tail_window(mean);
    if (tail.t.size() >= kMinFitPoints) {
      o.fit = rate_fit(tail.t, tail.values);
      o.fit_from = static_cast<std::size_t>(tail.t.front());
      fit << "gap_mean," << o.fit_from << ',' << static_cast<std::size_t>(tail.t.back()) << ',' << o.fit->points
          << ',' << format_number(o.fit->slope) << ',' << format_number(o.fit->intercept) << ','
          << format_number(o.fit->r_squared) << '\n';
    }
  }
  return o;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Schedule parse_schedule(const std::string& text, EstimatorKind kind, std::size_t horizon, const GameConstants& c,
                        double radius) {
  if (text == "theorem") return theorem_tuning(kind, horizon, c, radius);
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("schedule must be 'theorem', 'constant:g,d' or 'power:g0,p,d0,q'");
  }
  const std::string kind_text = text.substr(0, colon);
  const auto v = parse_numbers(text.substr(colon + 1));
  if (kind_text == "constant") {
    if (v.size() == 1 && kind == EstimatorKind::kFullInfo) return ConstantSchedule{v[0], 0.0};
    if (v.size() != 2) throw ValidationError("constant schedule needs gamma,delta");
    return ConstantSchedule{v[0], v[1]};
  }
  if (kind_text == "power") {
    if (v.size() != 4) throw ValidationError("power schedule needs gamma0,p,delta0,q");
    return PowerSchedule{v[0], v[1], v[2], v[3]};
  }
  throw ValidationError("unknown schedule kind '" + kind_text + "'");
}

json build_manifest(const RunConfig& config, const QuantumGame& game) {
  json cfg;
  cfg["game"] = config.game;
  cfg["game_spec"] = game_to_json(game);
  cfg["algo"] = config.algo;
  cfg["schedule"] = config.schedule;
  cfg["T"] = config.horizon;
  cfg["seeds"] = config.seeds;
  cfg["base_seed"] = config.base_seed;
  cfg["stride"] = config.stride;
  cfg["reference"] = config.reference;

  json manifest;
  manifest["config"] = cfg;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.dump())));
  manifest["config_hash"] = hash;
  json streams = json::array();
  for (std::size_t k = 0; k < config.seeds; ++k) streams.push_back(derive_stream_seed(config.base_seed, k));
  manifest["stream_seeds"] = streams;
  manifest["version"] = std::string(kVersion);
  return manifest;
}

RunConfig config_from_manifest(const json& manifest) {
  const auto& cfg = manifest.at("config");
  RunConfig c;
  c.game = cfg.at("game").get<std::string>();
  c.algo = cfg.at("algo").get<std::string>();
  c.schedule = cfg.at("schedule").get<std::string>();
  c.horizon = cfg.at("T").get<std::size_t>();
  c.seeds = cfg.at("seeds").get<std::size_t>();
  c.base_seed = cfg.at("base_seed").get<std::uint64_t>();
  c.stride = cfg.at("stride").get<std::size_t>();
  c.reference = cfg.at("reference").get<std::string>();
  return c;
}

std::vector<Trajectory> run_seeds(const QuantumGame& game, EstimatorKind kind, const Schedule& schedule,
                                  std::size_t horizon, std::uint64_t base_seed, std::size_t seeds,
                                  const RunOptions& options, std::size_t threads) {
  std::vector<Trajectory> results(seeds);
  std::vector<std::exception_ptr> errors(seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds; k = next++) {
      try {
        Rng rng(derive_stream_seed(base_seed, k));
        results[k] = run(game, kind, schedule, horizon, rng, options);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(seeds, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

namespace {

// Maps library exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ScheduleError& e) {
    err << "infeasible configuration: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
}

bool is_builtin(const std::string& ref) {
  if (ref.rfind("builtin:", 0) == 0) return true;
  for (auto name : fixtures::builtin_names()) {
    if (ref == name) return true;
  }
  return false;
}

int report_validation(const ValidationReport& report, const std::string& label, std::ostream& out) {
  out << "fail: " << label << '\n';
  for (const auto& v : report.violations) out << "  " << v.what << ": " << format_number(v.magnitude) << '\n';
  return kExitValidation;
}

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << manifest.dump(2) << '\n';
}

int run_with_game(const RunConfig& config, const QuantumGame& game, std::ostream& out, std::ostream& err) {
  const EstimatorKind kind = parse_estimator(config.algo);
  const auto report = validate(game);
  if (!report.ok()) return report_validation(report, config.game, out);
  if (kind == EstimatorKind::kOnePoint && game.form() != GameForm::kPovm) {
    err << "error: bandit mode requires POVM form\n";
    return kExitInfeasible;
  }
  if (config.seeds == 0 || config.horizon == 0) throw ValidationError("T and seeds must be positive");

  const GameConstants c = constants(game);
  const double radius = schedule_min_radius(kind, game);
  const Schedule schedule = parse_schedule(config.schedule, kind, config.horizon, c, radius);
  check_feasible(schedule, kind, config.horizon, radius);

  RunOptions options;
  options.reference = resolve_reference(config.reference, game);
  options.stride = config.stride;
  options.record_profiles = false;

  const auto runs = run_seeds(game, kind, schedule, config.horizon, config.base_seed, config.seeds, options,
                              config.threads);
  const Outputs o = write_outputs(config.out, runs, game, kind, c);
  write_manifest(config.out, build_manifest(config, game));

  double min_residual = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) min_residual = std::min(min_residual, r.min_energy_residual);
  out << "wrote " << runs.size() << " trajectories to " << config.out.string() << '\n';
  if (!o.gap.empty()) {
    out << "final mean gap " << format_number(o.gap.back().mean) << " (theorem bound "
        << format_number(theorem_bound(kind, static_cast<double>(config.horizon), c)) << ")\n";
  }
  if (o.fit) out << "tail slope " << format_number(o.fit->slope) << " from t=" << o.fit_from << '\n';
  out << "min energy residual " << format_number(min_residual) << '\n';
  return kExitOk;
}

}  // namespace

int cmd_validate(const std::string& game_ref, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GameSpecParse parsed;
    if (is_builtin(game_ref)) {
      parsed.game = resolve_game(game_ref);
    } else {
      parsed = load_game_spec(game_ref);
    }
    ValidationReport report = parsed.findings;
    if (parsed.game) {
      const auto semantic = validate(*parsed.game);
      report.violations.insert(report.violations.end(), semantic.violations.begin(), semantic.violations.end());
    }
    if (!report.ok()) return report_validation(report, game_ref, out);
    const auto& g = *parsed.game;
    out << "pass: " << (g.name().empty() ? game_ref : g.name()) << " (" << g.players()
        << " players, product dimension " << g.product_dim() << ")\n";
    return kExitOk;
  });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return run_with_game(config, resolve_game(config.game), out, err); });
}

int cmd_run_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir, std::size_t threads,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(manifest);
    if (!in) throw ValidationError("cannot open manifest '" + manifest.string() + "'");
    const json doc = json::parse(in);
    RunConfig config = config_from_manifest(doc);
    config.out = out_dir;
    config.threads = threads;
    auto parsed = parse_game_spec(doc.at("config").at("game_spec"));
    if (!parsed.game) return report_validation(parsed.findings, "manifest game", out);
    return run_with_game(config, *parsed.game, out, err);
  });
}

int cmd_estimator_stats(const EstimatorStatsConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const QuantumGame game = resolve_game(config.game);
    const auto report = validate(game);
    if (!report.ok()) return report_validation(report, config.game, out);
    const EstimatorKind kind = parse_estimator(config.algo);
    if (kind == EstimatorKind::kOnePoint && game.form() != GameForm::kPovm) {
      err << "error: bandit mode requires POVM form\n";
      return kExitInfeasible;
    }
    if (config.samples < kMinMomentSamples) {
      err << "error: at least " << kMinMomentSamples << " samples are required\n";
      return kExitInfeasible;
    }
    Profile profile = uniform_profile(game);
    if (config.profile == "equilibrium") {
      if (!game.equilibrium()) throw ValidationError("game has no equilibrium candidate");
      profile = *game.equilibrium();
    } else if (config.profile != "uniform") {
      throw ValidationError("profile must be 'uniform' or 'equilibrium'");
    }

    const GameConstants c = constants(game);
    std::ostringstream csv;
    csv << "delta,samples,bias,bias_se,bias_bound,bias_pass,second_moment,second_moment_se,second_moment_bound,"
           "second_moment_pass,max_sample_ratio,sample_bound_pass\n";
    for (std::size_t k = 0; k < config.deltas.size(); ++k) {
      Rng rng(derive_stream_seed(config.seed, k));
      const auto r = estimator_moments(game, profile, kind, config.deltas[k], config.samples, rng, c);
      csv << format_number(r.delta) << ',' << r.samples << ',' << format_number(r.bias) << ','
          << format_number(r.bias_se) << ',' << format_number(r.bias_bound) << ',' << (r.bias_pass ? 1 : 0) << ','
          << format_number(r.second_moment) << ',' << format_number(r.second_moment_se) << ','
          << format_number(r.second_moment_bound) << ',' << (r.second_moment_pass ? 1 : 0) << ','
          << format_number(r.max_sample_ratio) << ',' << (r.sample_bound_pass ? 1 : 0) << '\n';
    }
    if (config.out) {
      if (config.out->has_parent_path()) std::filesystem::create_directories(config.out->parent_path());
      std::ofstream f(*config.out, std::ios::binary);
      f << csv.str();
      out << "wrote " << config.deltas.size() << " rows to " << config.out->string() << '\n';
    } else {
      out << csv.str();
    }
    return kExitOk;
  });
}

int cmd_vs(const VsConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig& rc = config.run;
    const QuantumGame game = resolve_game(rc.game);
    const auto report = validate(game);
    if (!report.ok()) return report_validation(report, rc.game, out);
    const EstimatorKind kind = parse_estimator(rc.algo);
    if (kind == EstimatorKind::kOnePoint && game.form() != GameForm::kPovm) {
      err << "error: bandit mode requires POVM form\n";
      return kExitInfeasible;
    }
    const GameConstants c = constants(game);
    const double radius = schedule_min_radius(kind, game);
    const Schedule schedule = parse_schedule(rc.schedule, kind, rc.horizon, c, radius);
    const auto* power = std::get_if<PowerSchedule>(&schedule.spec());
    if (power == nullptr) {
      err << "infeasible configuration: vs requires a power schedule (power:g0,p,d0,q)\n";
      return kExitInfeasible;
    }
    const auto verdict = schedule_validate_vs(power->p, power->q);
    for (const auto& s : verdict.series) {
      out << "  " << s.name << ": summand t^-" << format_number(s.exponent) << ", " << s.message
          << (s.ok ? " (ok)" : " (fails)") << '\n';
    }
    if (!verdict.valid) {
      err << "invalid schedule: " << verdict.failures() << '\n';
      return kExitInfeasible;
    }
    check_feasible(schedule, kind, rc.horizon, radius);
    if (!game.equilibrium()) throw ValidationError("vs needs an equilibrium candidate in the game spec");
    const Profile& eq = *game.equilibrium();

    Rng cert_rng(splitmix64(rc.base_seed ^ 0x7673636572740000ULL));
    const auto cert = vs_certificate(game, eq, config.radius, config.certificate_samples, cert_rng);
    out << "certificate: max term " << format_number(cert.max_term) << " over " << cert.samples << " samples ("
        << cert.degenerate << " degenerate), " << (cert.plausible ? "plausible" : "not plausible") << '\n';
    if (!cert.plausible) err << "warning: equilibrium candidate fails the variational stability certificate\n";

    RunOptions options;
    options.reference = eq;
    options.stride = rc.stride;
    options.record_profiles = false;
    const auto runs = run_seeds(game, kind, schedule, rc.horizon, rc.base_seed, rc.seeds, options, rc.threads);
    const auto outcome = vs_success_rate(runs, eq, config.threshold);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      out << "  seed " << k << ": D(eq, X_T) = " << format_number(outcome.final_bregman[k]) << '\n';
    }
    out << "success fraction " << format_number(outcome.success_fraction) << " (threshold "
        << format_number(config.threshold) << ")\n";

    if (config.write_files) {
      RunConfig manifest_config = rc;
      manifest_config.reference = "equilibrium";
      write_outputs(rc.out, runs, game, kind, c);
      write_manifest(rc.out, build_manifest(manifest_config, game));
      std::ofstream f(rc.out / "vs.csv", std::ios::binary);
      f << "seed,final_bregman,success\n";
      for (std::size_t k = 0; k < runs.size(); ++k) {
        f << k << ',' << format_number(outcome.final_bregman[k]) << ','
          << (outcome.final_bregman[k] < config.threshold ? 1 : 0) << '\n';
      }
    }
    return kExitOk;
  });
}

int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw ValidationError("no manifest.json in '" + dir.string() + "'");
    const json manifest = json::parse(mf);
    const auto& cfg = manifest.at("config");
    out << "run " << manifest.at("config_hash").get<std::string>() << " (qmmw "
        << manifest.at("version").get<std::string>() << ")\n";
    out << "  game " << cfg.at("game").get<std::string>() << ", algo " << cfg.at("algo").get<std::string>()
        << ", schedule " << cfg.at("schedule").get<std::string>() << ", T " << cfg.at("T").get<std::size_t>()
        << ", seeds " << cfg.at("seeds").get<std::size_t>() << '\n';

    std::ifstream sf(dir / "summary.csv");
    std::string header;
    std::string line;
    std::string last;
    std::getline(sf, header);
    while (std::getline(sf, line)) last = line;
    if (!last.empty()) {
      const auto names = split_csv_line(header);
      const auto cells = split_csv_line(last);
      out << "  final row:";
      for (std::size_t k = 0; k < names.size() && k < cells.size(); ++k) {
        if (!cells[k].empty()) out << ' ' << names[k] << '=' << cells[k];
      }
      out << '\n';
    }

    std::ifstream ff(dir / "fit.csv");
    std::getline(ff, header);
    if (std::getline(ff, line)) {
      const auto cells = split_csv_line(line);
      if (cells.size() >= 7) {
        out << "  rate fit over t in [" << cells[1] << ", " << cells[2] << "]: slope " << cells[4] << ", R^2 "
            << cells[6] << '\n';
      }
    } else {
      out << "  no rate fit (fewer than " << kMinFitPoints << " tail points or no gap series)\n";
    }
    return kExitOk;
  });
}

}  // namespace qmmw::cli
