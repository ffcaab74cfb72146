// Acceptance criteria runner. Prints one [PASS]/[FAIL] line per criterion.
//
// Exit status is 0 iff the set of failing criteria equals --expect-fail, so a
// documented failure stays visible without breaking ctest and any change in
// status (regression or fix) is reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qmmw/analysis.hpp"
#include "qmmw/fixtures.hpp"
#include "qmmw/learning.hpp"
#include "qmmw/random_matrices.hpp"
#include "qmmw/tangent_basis.hpp"

namespace {

using namespace qmmw;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g6(double x) { return fmt("%.6g", x); }

// Horizons 10^2 .. 10^5 at third-decade spacing; the fit needs at least 8 points.
std::vector<std::size_t> horizon_grid() {
  std::vector<std::size_t> out;
  for (int k = 0; k <= 9; ++k) out.push_back(static_cast<std::size_t>(std::llround(std::pow(10.0, 2.0 + k / 3.0))));
  return out;
}

Outcome ac1_basis() {
  Rng rng(derive_stream_seed(1, 0));
  double gram_err = 0.0;
  double trace_err = 0.0;
  double ball_min = 0.0;
  double pivot_min = 0.0;
  bool sizes = true;
  for (std::size_t d = 2; d <= 6; ++d) {
    const auto b = build_basis(d);
    sizes = sizes && b.size() == d * d - 1;
    for (std::size_t a = 0; a < b.size(); ++a) {
      trace_err = std::max(trace_err, std::abs(b.elements[a].trace()));
      for (std::size_t c = 0; c < b.size(); ++c) {
        gram_err = std::max(gram_err, std::abs(frob_inner(b.elements[a], b.elements[c]) - (a == c ? 1.0 : 0.0)));
      }
    }
    const auto sp = safety_params(d);
    for (const auto& w : b.elements) {
      for (double s : {1.0, -1.0}) {
        ball_min = std::min(ball_min, lambda_min(sp.reference.hermitian() + w * (s * sp.radius)));
      }
    }
    for (int rep = 0; rep < 1000; ++rep) {
      const auto x = random_density_mixed_rank(rng, d);
      for (double frac : {0.5, 0.99}) {
        const double delta = frac * sp.radius;
        const auto xh = pivot(x, delta, sp);
        for (const auto& w : b.elements) {
          pivot_min = std::min(pivot_min, lambda_min(xh.hermitian() + w * delta));
          pivot_min = std::min(pivot_min, lambda_min(xh.hermitian() - w * delta));
        }
      }
    }
  }
  Outcome o;
  o.pass = sizes && gram_err <= 1e-12 && trace_err <= 1e-12 && ball_min >= -1e-12 && pivot_min >= -1e-12;
  o.detail = "sizes " + std::string(sizes ? "ok" : "wrong") + ", gram err " + g6(gram_err) + ", |tr| " +
             g6(trace_err) + ", min eig R+rW " + g6(ball_min) + ", min eig pivot+-dW " + g6(pivot_min);
  return o;
}

Outcome ac2_pinsker() {
  Rng rng(derive_stream_seed(2, 0));
  double worst = 1e300;
  for (std::size_t d = 2; d <= 4; ++d) {
    for (int rep = 0; rep < 10000; ++rep) {
      const auto p = random_density_mixed_rank(rng, d);
      const auto x = random_density_mixed_rank(rng, d);
      const double dist = frob_norm(p.matrix() - x.matrix());
      worst = std::min(worst, bregman(p, x).value - 0.5 * dist * dist);
    }
  }
  return {worst >= -1e-9, "min D - |P-X|^2/2 over 3x10^4 pairs " + g6(worst)};
}

Outcome ac3_energy() {
  double worst = 1e300;
  std::size_t violations = 0;
  for (const char* name : {"matching-pennies", "skewed-pennies"}) {
    const auto game = fixtures::builtin(name);
    const auto c = constants(game);
    const double r = min_radius(player_geometry(game));
    for (auto kind : {EstimatorKind::kFullInfo, EstimatorKind::kTwoPoint, EstimatorKind::kOnePoint}) {
      for (std::size_t s = 0; s < 20; ++s) {
        Rng rng(derive_stream_seed(3, s));
        RunOptions o;
        o.record_grid = {1000};
        o.record_profiles = false;
        Profile ref;
        for (std::size_t d : game.dims()) ref.push_back(random_density_mixed_rank(rng, d));
        o.reference = ref;
        const auto tr = run(game, kind, theorem_tuning(kind, 1000, c, r), 1000, rng, o);
        worst = std::min(worst, tr.min_energy_residual);
        violations += tr.energy_violations;
      }
    }
  }
  return {violations == 0 && worst >= -1e-8,
          "3 algorithms x 20 seeds x T=1000 on matching and skewed pennies; min residual " + g6(worst) +
              ", violations " + std::to_string(violations)};
}

Outcome ac4_full_info() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"matching-pennies", "skewed-pennies"}) {
    const auto game = fixtures::builtin(name);
    const auto c = constants(game);
    detail += std::string(detail.empty() ? "" : "; ") + name + ":";
    for (std::size_t T : {100U, 1000U, 10000U}) {
      Rng rng(0);
      RunOptions o;
      o.record_grid = {T};
      o.record_profiles = false;
      const auto tr = run(game, EstimatorKind::kFullInfo, theorem_tuning(EstimatorKind::kFullInfo, T, c, 1.0), T, rng, o);
      const double gap = *tr.records.back().gap;
      const double bound = theorem_bound(EstimatorKind::kFullInfo, static_cast<double>(T), c);
      pass = pass && gap <= bound;
      detail += " T=" + std::to_string(T) + " gap " + g6(gap) + " <= " + g6(bound);
    }
  }
  return {pass, detail};
}

Outcome moments(EstimatorKind kind) {
  bool pass = true;
  std::string detail;
  for (const char* name : {"matching-pennies", "skewed-pennies"}) {
    const auto game = fixtures::builtin(name);
    Rng rng(derive_stream_seed(kind == EstimatorKind::kTwoPoint ? 5 : 6, 0));
    const auto r = estimator_moments(game, uniform_profile(game), kind, 0.05, 100000, rng);
    if (kind == EstimatorKind::kTwoPoint) {
      pass = pass && r.bias_pass && r.second_moment_pass;
    } else {
      pass = pass && r.sample_bound_pass && r.second_moment_pass;
    }
    detail += std::string(detail.empty() ? "" : "; ") + name + ": bias " + g6(r.bias) + " (se " + g6(r.bias_se) +
              ", bound " + g6(r.bias_bound) + "), E|Z|^2 " + g6(r.second_moment) + " (se " + g6(r.second_moment_se) +
              ", bound " + g6(r.second_moment_bound) + ")";
    if (kind == EstimatorKind::kOnePoint) detail += ", max |Z_i|/(D_i B/delta) " + fmt("%.17g", r.max_sample_ratio);
  }
  return {pass, detail};
}

Outcome rate(EstimatorKind kind, double lo, double hi) {
  const auto game = fixtures::skewed_pennies();
  const auto c = constants(game);
  const double r = min_radius(player_geometry(game));
  std::vector<double> ts;
  std::vector<double> gaps;
  bool under = true;
  std::string detail;
  for (std::size_t T : horizon_grid()) {
    const std::size_t horizon = T;
    const std::size_t tmin = minimal_feasible_horizon(kind, c, r);
    const auto schedule = theorem_tuning(kind, std::max(horizon, tmin), c, r);
    RunOptions o;
    o.record_grid = {horizon};
    o.record_profiles = false;
    const auto runs = cli::run_seeds(game, kind, schedule, horizon, 7, 20, o, 0);
    std::vector<double> finals;
    for (const auto& tr : runs) finals.push_back(*tr.records.back().gap);
    std::sort(finals.begin(), finals.end());
    double mean = 0.0;
    for (double g : finals) mean += g;
    mean /= static_cast<double>(finals.size());
    const double bound = theorem_bound(kind, static_cast<double>(horizon), c);
    under = under && mean <= bound;
    ts.push_back(static_cast<double>(horizon));
    gaps.push_back(mean);
    if (T == 100 || T == 1000 || T == 10000 || T == 100000) {
      detail += " T=" + std::to_string(T) + " gap " + g6(mean) + " (bound " + g6(bound) + ")";
    }
  }
  const auto fit = rate_fit(ts, gaps);
  const bool slope_ok = fit.slope >= lo && fit.slope <= hi;
  detail = "skewed pennies, 20 seeds;" + detail + "; slope " + fmt("%.4f", fit.slope) + " over " +
           std::to_string(ts.size()) + " horizons, target [" + g6(lo) + ", " + g6(hi) + "]" +
           (under ? "" : "; bound exceeded");
  return {under && slope_ok, detail};
}

Outcome ac9_vs() {
  const auto game = fixtures::dominant();
  const auto& eq = *game.equilibrium();
  Rng cert_rng(derive_stream_seed(9, 0));
  const auto cert = vs_certificate(game, eq, 0.1, 10000, cert_rng);
  const auto verdict = schedule_validate_vs(0.9, 0.2);

  const double r = min_radius(player_geometry(game));
  const PowerSchedule schedule{0.2, 0.9, 0.9 * r, 0.2};
  const std::size_t T = 100000;
  RunOptions o;
  o.reference = eq;
  o.record_profiles = false;
  const auto runs = cli::run_seeds(game, EstimatorKind::kOnePoint, schedule, T, 9, 50, o, 0);
  const auto outcome = vs_success_rate(runs, eq, 1e-2);

  std::vector<Series> series;
  for (const auto& tr : runs) {
    Series s;
    for (const auto& rec : tr.records) {
      s.t.push_back(static_cast<double>(rec.t));
      s.values.push_back(*rec.bregman);
    }
    series.push_back(std::move(s));
  }
  std::size_t increases = 0;
  std::size_t points = 0;
  double prev = 1e300;
  for (const auto& b : aggregate(series)) {
    if (b.t < static_cast<double>(T) / 10.0) continue;
    if (b.median > prev) ++increases;
    prev = b.median;
    ++points;
  }
  const bool pass = cert.plausible && verdict.valid && outcome.success_fraction >= 0.9 && increases == 0;
  return {pass, "certificate max " + g6(cert.max_term) + (cert.plausible ? " (plausible)" : " (not plausible)") +
                    "; gamma0 0.2, delta0 " + g6(0.9 * r) + ", T=10^5, 50 seeds: success " +
                    g6(outcome.success_fraction) + ", median final D " + g6(quantile(outcome.final_bregman, 0.5)) +
                    ", median-series increases over last decade " + std::to_string(increases) + "/" +
                    std::to_string(points)};
}

Outcome ac10_validator() {
  const auto a = schedule_validate_vs(0.9, 0.2);
  const auto b = schedule_validate_vs(0.5, 0.2);
  const auto c = schedule_validate_vs(1.2, 0.2);
  const bool pass = a.valid && !b.valid && b.failures().find("Σγ²/δ² diverges") != std::string::npos && !c.valid &&
                    c.failures() == "Σγ converges";
  return {pass, "(0.9,0.2) " + std::string(a.valid ? "valid" : "invalid") + "; (0.5,0.2) " + b.failures() +
                    "; (1.2,0.2) " + c.failures()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac11_reproducible() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "qmmw_acceptance_repro";
  fs::remove_all(root);
  std::ostringstream sink;
  bool pass = true;
  std::size_t compared = 0;
  for (const char* algo : {"mmw", "3mw-2pe", "3mw-1pe"}) {
    cli::RunConfig c;
    c.game = "skewed-pennies";
    c.algo = algo;
    c.horizon = 3000;
    c.seeds = 4;
    c.base_seed = 11;
    c.out = root / algo / "a";
    c.threads = 1;
    pass = pass && cli::cmd_run(c, sink, sink) == cli::kExitOk;
    const auto b = root / algo / "b";
    pass = pass && cli::cmd_run_manifest(c.out / "manifest.json", b, 4, sink, sink) == cli::kExitOk;
    for (const auto& entry : fs::directory_iterator(c.out)) {
      if (entry.path().extension() != ".csv") continue;
      pass = pass && slurp(entry.path()) == slurp(b / entry.path().filename());
      ++compared;
    }
  }
  fs::remove_all(root);
  return {pass && compared > 0, std::to_string(compared) + " CSV files compared across 3 algorithms, replay with 4 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmmw acceptance criteria"};
  std::vector<std::string> only;
  std::vector<std::string> expect_fail;
  std::string report_path;
  app.add_option("--report", report_path, "also write the result lines to this file");
  app.add_option("--only", only, "run only these criteria (e.g. AC1,AC5)")->delimiter(',');
  app.add_option("--expect-fail", expect_fail, "criteria documented as failing")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 basis/feasibility", ac1_basis},
      {"AC2 Pinsker audit", ac2_pinsker},
      {"AC3 energy inequality", ac3_energy},
      {"AC4 full-information rate", ac4_full_info},
      {"AC5 2PE moment bounds", [] { return moments(EstimatorKind::kTwoPoint); }},
      {"AC6 1PE moment bounds", [] { return moments(EstimatorKind::kOnePoint); }},
      {"AC7 2PE convergence rate", [] { return rate(EstimatorKind::kTwoPoint, -0.65, -0.35); }},
      {"AC8 1PE convergence rate", [] { return rate(EstimatorKind::kOnePoint, -0.40, -0.10); }},
      {"AC9 VS last iterate", ac9_vs},
      {"AC10 schedule validator", ac10_validator},
      {"AC11 reproducibility", ac11_reproducible},
  };

  const std::set<std::string> expected(expect_fail.begin(), expect_fail.end());
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path, std::ios::binary);
  auto emit = [&](const std::string& line) {
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    if (report) report << line << std::flush;
  };
  std::size_t passed = 0;
  std::size_t ran = 0;
  bool as_expected = true;
  for (const auto& [label, fn] : criteria) {
    const std::string id = label.substr(0, label.find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = fn();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++ran;
    if (o.pass) ++passed;
    const bool known = expected.count(id) > 0;
    if (o.pass == known) as_expected = false;
    emit("[" + std::string(o.pass ? "PASS" : "FAIL") + "] " + label + ": " + o.detail + " (" + fmt("%.1f", secs) +
         "s)" + (!o.pass && known ? " [documented]" : (o.pass && known ? " [unexpected pass]" : "")) + "\n");
  }
  emit(std::to_string(passed) + "/" + std::to_string(ran) + " criteria passed\n");
  return as_expected ? 0 : 1;
}
