#pragma once

// Experiment drivers behind the command-line subcommands. Each returns the
// results table as text plus a summary; file I/O and timing live in the tool.
// Column layouts are fixed per experiment (see table_columns).

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "dklab/cli/config.hpp"
#include "dklab/core/stats.hpp"
#include "dklab/duality/duality.hpp"
#include "dklab/particles/particle_system.hpp"
#include "dklab/pgf/monte_carlo.hpp"
#include "dklab/pgf/verdict.hpp"
#include "dklab/spde/density_field.hpp"
#include "dklab/vhj/checks.hpp"

namespace dklab::cli {

inline constexpr const char* kVersion = "dklab 0.1.0";

enum ExitCode : int { kPass = 0, kUsage = 1, kStatisticalFail = 2, kIoError = 3 };

inline const std::map<std::string, std::vector<std::string>>& table_columns() {
  static const std::map<std::string, std::vector<std::string>> cols{
      {"duality", {"alpha", "t", "f_id", "mc_mean", "mc_stderr", "rhs", "z", "verdict"}},
      {"martingale",
       {"alpha", "phi_id", "t", "replicates", "mean_m", "stderr_m", "z_mean", "mean_m2", "mean_qv", "stderr_diff", "z_qv",
        "verdict"}},
      {"pgf", {"alpha", "t", "kind", "k", "value", "uncertainty", "label"}},
      {"breakdown", {"alpha", "grid", "dt", "noise_scale", "member", "first_negative_step", "cell", "value"}},
      {"vhj-check", {"alpha", "t", "function_id", "check", "value", "bound", "verdict"}},
  };
  return cols;
}

/// Shortest round-trip decimal form; identical bytes on every run.
inline std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}
inline std::string fmt(std::size_t x) { return std::to_string(x); }

class Table {
 public:
  explicit Table(const std::string& experiment) {
    const auto& cols = table_columns().at(experiment);
    width_ = cols.size();
    row(cols);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::logic_error("Table: row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  std::size_t width_ = 0;
  std::ostringstream out_;
};

struct RunOutcome {
  int exit_code = kPass;
  std::string table;
  json summary = json::object();  // per-criterion verdicts and counts
  std::vector<std::uint64_t> seeds;
};

inline const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

inline RunOutcome run_duality(const RunConfig& c) {
  RunOutcome out;
  Table table(c.experiment);
  const auto mu0 = empirical_mu0(c);
  DualityOptions opt;
  opt.grid_size = c.grid_size;
  std::size_t cell = 0, passed = 0;
  for (double t : c.times) {
    for (std::size_t i = 0; i < c.functions.size(); ++i, ++cell) {
      const std::uint64_t seed = derive_seed(c.seed, cell);
      out.seeds.push_back(seed);
      const auto rep = run_duality_test(c.alpha, mu0, c.functions[i], t, c.replicates, seed, opt);
      passed += rep.pass ? 1 : 0;
      table.row({fmt(c.alpha), fmt(t), fmt(i), fmt(rep.mc_mean), fmt(rep.mc_stderr), fmt(rep.rhs), fmt(rep.z_score),
                 pass_fail(rep.pass)});
    }
  }
  const std::size_t budget = false_alarm_budget(cell, kThreeSigmaTail);
  const bool ok = cell - passed <= budget;
  out.table = table.str();
  out.summary = {{"cells", cell}, {"passed", passed}, {"allowed_failures", budget}, {"verdict", pass_fail(ok)}};
  out.exit_code = ok ? kPass : kStatisticalFail;
  return out;
}

inline RunOutcome run_martingale(const RunConfig& c) {
  RunOutcome out;
  Table table(c.experiment);
  const auto mu0 = empirical_mu0(c);
  const std::vector<std::size_t> checkpoints{c.steps / 2, c.steps};
  out.seeds.push_back(c.seed);
  const auto cps = martingale_ensemble(mu0, c.alpha, c.t, c.steps, c.functions, checkpoints, c.replicates, c.seed);
  std::size_t tests = 0, failures = 0;
  for (const auto& cp : cps) {
    const auto& r = cp.report;
    const bool ok = r.passes(3.0);
    tests += 2;
    failures += (std::abs(r.z_mean) > 3.0 ? 1 : 0) + (std::abs(r.z_qv) > 3.0 ? 1 : 0);
    table.row({fmt(c.alpha), fmt(cp.phi_index), fmt(cp.t), fmt(r.replicates), fmt(r.mean_m), fmt(r.stderr_m),
               fmt(r.z_mean), fmt(r.mean_m2), fmt(r.mean_qv), fmt(r.stderr_diff), fmt(r.z_qv), pass_fail(ok)});
  }
  const std::size_t budget = false_alarm_budget(tests, kThreeSigmaTail);
  const bool ok = failures <= budget;
  out.table = table.str();
  out.summary = {{"tests", tests}, {"failures", failures}, {"allowed_failures", budget}, {"verdict", pass_fail(ok)}};
  out.exit_code = ok ? kPass : kStatisticalFail;
  return out;
}

/// Series coefficients and the atomicity verdict; for integer alpha with alpha
/// equal-weight atoms also the Monte Carlo histogram and its chi-square test.
inline RunOutcome run_pgf(const RunConfig& c) {
  RunOutcome out;
  Table table(c.experiment);
  const TorusDomain dom(c.grid_size);
  const auto occ = OccupationFunction::build(dom, c.set, c.t, c.alpha);
  const auto atoms = weighted_mu0(c);
  const auto verdict = atomicity_verdict(c.alpha, atoms, occ, c.order);
  const auto& e = verdict.expansion;
  for (std::size_t k = 0; k < e.coefficients.size(); ++k) {
    table.row({fmt(c.alpha), fmt(c.t), "p", fmt(k), fmt(e.coefficients[k]), fmt(e.uncertainty[k]), to_string(e.method)});
  }
  bool ok = true;
  const bool simulate = detail::is_integer(c.alpha) && atoms.uniform_count && *atoms.uniform_count == static_cast<std::size_t>(c.alpha);
  if (simulate) {
    out.seeds.push_back(c.seed);
    const auto mc = monte_carlo_pgf(c.alpha, empirical_mu0(c), occ, c.replicates, c.seed);
    for (std::size_t k = 0; k < mc.expansion.coefficients.size(); ++k) {
      table.row({fmt(c.alpha), fmt(c.t), "mc", fmt(k), fmt(mc.expansion.coefficients[k]), fmt(mc.expansion.uncertainty[k]),
                 to_string(mc.expansion.method)});
    }
    std::vector<double> probs(mc.counts.size(), 0.0);
    for (std::size_t k = 0; k < probs.size() && k < e.coefficients.size(); ++k) probs[k] = e.coefficients[k];
    const auto chi = chi_square_gof(mc.counts, probs);
    const bool chi_ok = chi.p_value >= 1e-3;
    const bool integer_ok = mc.non_integer_samples == 0 && mc.out_of_range_samples == 0;
    ok = chi_ok && integer_ok;
    table.row({fmt(c.alpha), fmt(c.t), "chi2", fmt(chi.dof), fmt(chi.p_value), fmt(chi.statistic), pass_fail(chi_ok)});
    out.summary["chi_square_p"] = chi.p_value;
    out.summary["non_integer_samples"] = mc.non_integer_samples;
    out.summary["out_of_range_samples"] = mc.out_of_range_samples;
  }
  const std::size_t order = verdict.order.value_or(e.requested_order);
  table.row({fmt(c.alpha), fmt(c.t), "verdict", fmt(order), fmt(verdict.evidence), "0", to_string(verdict.verdict)});
  out.table = table.str();
  out.summary["verdict"] = to_string(verdict.verdict);
  out.summary["detail"] = verdict.detail;
  out.summary["monte_carlo"] = pass_fail(ok);
  out.exit_code = ok ? kPass : kStatisticalFail;
  return out;
}

/// Descriptive breakdown statistics of the naive grid scheme; never a pass/fail
/// statement about a solution (there is none to approximate).
inline RunOutcome run_breakdown(const RunConfig& c) {
  RunOutcome out;
  Table table(c.experiment);
  const auto density = detail::function_from_json(c.mu0["density"], "mu0.density");
  const double dt = c.dt_fraction * SpdeConfig::stability_bound(c.grid_size, c.alpha);
  const auto field0 = DensityField::from_function(c.grid_size, dt, density);
  const SpdeConfig cfg{c.alpha, c.noise_scale};
  out.seeds.push_back(c.seed);
  const auto rep = breakdown_ensemble(field0, cfg, c.max_steps, c.replicates, c.seed);
  for (std::size_t m = 0; m < rep.members; ++m) {
    const auto& ev = rep.events[m];
    table.row({fmt(c.alpha), fmt(c.grid_size), fmt(dt), fmt(c.noise_scale), fmt(m), ev ? fmt(ev->step) : "none",
               ev ? fmt(ev->cell) : "", ev ? fmt(ev->value) : ""});
  }
  out.table = table.str();
  out.summary = {{"members", rep.members},
                 {"negative_within_max_steps", rep.negative},
                 {"median_first_negative_step", rep.median_step},
                 {"note", "artifact-calibrated breakdown statistics of a naive scheme, not a convergence claim"}};
  return out;
}

inline RunOutcome run_vhj_check(const RunConfig& c) {
  RunOutcome out;
  Table table(c.experiment);
  const TorusDomain dom(c.grid_size);
  out.seeds.push_back(c.seed);
  const double dt0 = std::min(1e-3, c.t / 4.0);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < c.suite_size; ++i) {
    RngStream stream(c.seed, i);
    const FourierFunction f = random_test_function(stream);
    const auto field = cole_hopf(dom, f, c.alpha, c.t);
    const auto ext = check_extremum_principles(field);
    const auto grad = check_gradient_estimate(field);
    const auto levels = residual_refinement(dom, f, c.alpha, c.t, dt0, 3);
    double order = std::numeric_limits<double>::infinity();
    for (const auto& l : levels) {
      if (l.observed_order) order = std::min(order, *l.observed_order);
    }
    const bool order_ok = order >= 1.9;
    failures += (ext.lower_margin >= -1e-12 ? 0 : 1) + (ext.upper_margin >= -1e-12 ? 0 : 1) + (grad.holds ? 0 : 1) +
                (grad.sharp_holds ? 0 : 1) + (order_ok ? 0 : 1);
    const std::string id = fmt(i);
    table.row({fmt(c.alpha), fmt(c.t), id, "min-principle", fmt(ext.inf_v), fmt(ext.inf_f), pass_fail(ext.lower_margin >= -1e-12)});
    table.row({fmt(c.alpha), fmt(c.t), id, "max-principle", fmt(ext.sup_v), fmt(ext.sup_f), pass_fail(ext.upper_margin >= -1e-12)});
    table.row({fmt(c.alpha), fmt(c.t), id, "gradient", fmt(grad.max_gamma_v), fmt(grad.bound), pass_fail(grad.holds)});
    table.row({fmt(c.alpha), fmt(c.t), id, "gradient-sharp", fmt(grad.sharp_max_excess), "0", pass_fail(grad.sharp_holds)});
    table.row({fmt(c.alpha), fmt(c.t), id, "residual-order", fmt(order), "1.9", pass_fail(order_ok)});
  }
  out.table = table.str();
  out.summary = {{"functions", c.suite_size}, {"failures", failures}, {"verdict", pass_fail(failures == 0)}};
  out.exit_code = failures == 0 ? kPass : kStatisticalFail;
  return out;
}

inline RunOutcome run_experiment(const RunConfig& c) {
  if (c.experiment == "duality") return run_duality(c);
  if (c.experiment == "martingale") return run_martingale(c);
  if (c.experiment == "pgf") return run_pgf(c);
  if (c.experiment == "breakdown") return run_breakdown(c);
  if (c.experiment == "vhj-check") return run_vhj_check(c);
  throw ConfigError("experiment: unknown \"" + c.experiment + "\"");
}

inline std::string manifest_path(const std::string& results_path) { return results_path + ".manifest.json"; }

inline json make_manifest(const RunConfig& c, const RunOutcome& o, double wall_seconds) {
  return json{{"version", kVersion},
              {"config", to_json(c)},
              {"results", c.output_path},
              {"columns", table_columns().at(c.experiment)},
              {"wall_time_seconds", wall_seconds},
              {"exit_code", o.exit_code},
              {"verdicts", o.summary},
              {"seeds", o.seeds}};
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

/// Runs and persists results plus manifest.
inline RunOutcome run_and_write(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome o = run_experiment(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(c.output_path, o.table);
  write_file(manifest_path(c.output_path), make_manifest(c, o, wall).dump(2) + "\n");
  return o;
}

struct ReplayResult {
  bool identical = false;
  std::size_t first_difference = 0;  // byte offset when not identical
  std::string results_path;
};

/// Re-runs the manifest's config in memory and compares against the recorded table.
inline ReplayResult replay(const std::string& manifest_file) {
  json m;
  try {
    m = json::parse(read_file(manifest_file));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!m.contains("config") || !m.contains("results")) throw ConfigError("manifest: missing config or results");
  const json& cfg = m["config"];
  const RunConfig c = resolve_config(cfg.at("experiment").get<std::string>(), cfg);
  const std::string recorded = read_file(m["results"].get<std::string>());
  const std::string fresh = run_experiment(c).table;
  ReplayResult r;
  r.results_path = m["results"].get<std::string>();
  r.identical = recorded == fresh;
  if (!r.identical) {
    const auto mism = std::mismatch(recorded.begin(), recorded.end(), fresh.begin(), fresh.end());
    r.first_difference = static_cast<std::size_t>(mism.first - recorded.begin());
  }
  return r;
}

}  // namespace dklab::cli
