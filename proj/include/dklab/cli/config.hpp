#pragma once

// Run configuration: a JSON object (file) overlaid by command-line flags,
// validated in full before anything is computed. to_json() gives the resolved
// form, which is what manifests record and what replay feeds back in.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dklab/core/fourier.hpp"
#include "dklab/core/torus.hpp"
#include "dklab/duality/duality.hpp"
#include "dklab/particles/empirical_measure.hpp"
#include "dklab/pgf/extract.hpp"
#include "dklab/pgf/generating.hpp"
#include "dklab/pgf/occupation.hpp"

namespace dklab::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiments() {
  static const std::vector<std::string> names{"duality", "martingale", "pgf", "breakdown", "vhj-check"};
  return names;
}

/// Flag values; unset members leave the file value alone.
struct FlagOverrides {
  std::optional<double> alpha;
  std::optional<double> t;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::string> out;
};

struct RunConfig {
  std::string experiment;
  double alpha = 0.0;
  double t = 0.05;
  std::vector<double> times;  // duality: evaluation times (default {t})
  std::size_t replicates = 0;
  std::uint64_t seed = 1;
  std::size_t grid_size = 256;
  std::string output_path = "results.csv";
  json mu0;                            // {"atoms": [...], "weights"?: [...]} | {"evenly_spaced": n} | {"density": f}
  std::vector<FourierFunction> functions;  // duality f's, martingale phi's
  std::vector<Interval> set;           // pgf: A as a union of arcs
  std::size_t order = 8;               // pgf: series order K
  std::size_t steps = 50;              // martingale: time steps
  double dt_fraction = 0.5;            // breakdown: dt as a fraction of dx^2/alpha
  double noise_scale = 1.0;            // breakdown
  std::size_t max_steps = 10000;       // breakdown
  std::size_t suite_size = 50;         // vhj-check
};

namespace detail {

inline const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys{"experiment", "alpha",     "t",           "times",       "replicates",
                                          "seed",       "grid_size", "output_path", "mu0",         "functions",
                                          "set",        "order",     "steps",       "dt_fraction", "noise_scale",
                                          "max_steps",  "suite_size"};
  return keys;
}

inline json function_to_json(const FourierFunction& f) {
  return json{{"mean", f.mean()},
              {"cos", std::vector<double>(f.cos_coeffs().begin(), f.cos_coeffs().end())},
              {"sin", std::vector<double>(f.sin_coeffs().begin(), f.sin_coeffs().end())}};
}

inline FourierFunction function_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object with mean/cos/sin");
  for (const auto& [k, v] : j.items()) {
    if (k != "mean" && k != "cos" && k != "sin") throw ConfigError(where + ": unknown key \"" + k + "\"");
  }
  try {
    return FourierFunction(j.value("mean", 0.0), j.value("cos", std::vector<double>{}),
                           j.value("sin", std::vector<double>{}));
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

inline bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

}  // namespace detail

/// Loads a JSON config file (object at top level).
inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline std::size_t default_replicates(const std::string& experiment) {
  if (experiment == "pgf") return 100000;
  if (experiment == "breakdown") return 100;
  return 10000;
}

/// Default mu_0: n evenly spaced atoms for integer alpha = n, else one atom at 1/2.
inline json default_mu0(double alpha) {
  if (detail::is_integer(alpha) && alpha >= 1.0) return json{{"evenly_spaced", static_cast<std::size_t>(alpha)}};
  return json{{"atoms", {0.5}}};
}

inline bool mu0_is_density(const RunConfig& c) { return c.mu0.contains("density"); }

inline EmpiricalMeasure empirical_mu0(const RunConfig& c) {
  if (c.mu0.contains("evenly_spaced")) return EmpiricalMeasure::evenly_spaced(c.mu0["evenly_spaced"].get<std::size_t>());
  return EmpiricalMeasure(c.mu0.at("atoms").get<std::vector<double>>());
}

inline WeightedAtoms weighted_mu0(const RunConfig& c) {
  if (mu0_is_density(c)) {
    return WeightedAtoms::from_density(TorusDomain(c.grid_size), detail::function_from_json(c.mu0["density"], "mu0.density"));
  }
  if (c.mu0.contains("weights")) {
    return WeightedAtoms::weighted(c.mu0.at("atoms").get<std::vector<double>>(), c.mu0["weights"].get<std::vector<double>>());
  }
  return WeightedAtoms::from(empirical_mu0(c));
}

/// Resolves and validates. `subcommand` wins unless the file names a different experiment.
inline RunConfig resolve_config(const std::string& subcommand, json file, const FlagOverrides& flags = {}) {
  if (!file.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [k, v] : file.items()) {
    if (!detail::allowed_keys().contains(k)) throw ConfigError("config: unknown key \"" + k + "\"");
  }
  if (flags.alpha) file["alpha"] = *flags.alpha;
  if (flags.t) {
    file["t"] = *flags.t;
    file["times"] = json::array({*flags.t});
  }
  if (flags.replicates) file["replicates"] = *flags.replicates;
  if (flags.seed) file["seed"] = *flags.seed;
  if (flags.grid) file["grid_size"] = *flags.grid;
  if (flags.out) file["output_path"] = *flags.out;

  RunConfig c;
  c.experiment = subcommand;
  if (file.contains("experiment")) {
    const auto named = detail::get<std::string>(file, "experiment");
    if (named != subcommand) throw ConfigError("experiment: config names \"" + named + "\" but subcommand is " + subcommand);
  }
  if (std::find(experiments().begin(), experiments().end(), c.experiment) == experiments().end()) {
    throw ConfigError("experiment: unknown \"" + c.experiment + "\"");
  }
  if (!file.contains("alpha")) throw ConfigError("alpha: required");
  c.alpha = detail::get<double>(file, "alpha");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha: must be positive and finite");

  if (file.contains("t")) c.t = detail::get<double>(file, "t");
  if (!(c.t > 0.0) || !std::isfinite(c.t)) throw ConfigError("t: must be positive and finite");
  c.times = file.contains("times") ? detail::get<std::vector<double>>(file, "times") : std::vector<double>{c.t};
  if (c.times.empty()) throw ConfigError("times: must be nonempty");
  for (double t : c.times) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("times: entries must be positive");
  }

  c.replicates = file.contains("replicates") ? detail::get<std::size_t>(file, "replicates") : default_replicates(c.experiment);
  const std::size_t min_reps = c.experiment == "martingale" ? 100 : (c.experiment == "breakdown" ? 1 : 2);
  if (c.replicates < min_reps) throw ConfigError("replicates: must be at least " + std::to_string(min_reps));
  if (file.contains("seed")) c.seed = detail::get<std::uint64_t>(file, "seed");
  if (file.contains("grid_size")) c.grid_size = detail::get<std::size_t>(file, "grid_size");
  try {
    (void)TorusDomain(c.grid_size);
  } catch (const std::exception&) {
    throw ConfigError("grid_size: must be a power of two >= 8");
  }
  if (file.contains("output_path")) c.output_path = detail::get<std::string>(file, "output_path");
  if (c.output_path.empty()) throw ConfigError("output_path: must be nonempty");

  if (file.contains("order")) c.order = detail::get<std::size_t>(file, "order");
  if (c.order > kMaxSeriesOrder) throw ConfigError("order: at most 64");
  if (file.contains("steps")) c.steps = detail::get<std::size_t>(file, "steps");
  if (c.steps < 2) throw ConfigError("steps: must be at least 2");
  if (file.contains("dt_fraction")) c.dt_fraction = detail::get<double>(file, "dt_fraction");
  if (!(c.dt_fraction > 0.0 && c.dt_fraction <= 1.0)) throw ConfigError("dt_fraction: must lie in (0, 1] (stability)");
  if (file.contains("noise_scale")) c.noise_scale = detail::get<double>(file, "noise_scale");
  if (!(c.noise_scale >= 0.0) || !std::isfinite(c.noise_scale)) throw ConfigError("noise_scale: must be nonnegative");
  if (file.contains("max_steps")) c.max_steps = detail::get<std::size_t>(file, "max_steps");
  if (file.contains("suite_size")) c.suite_size = detail::get<std::size_t>(file, "suite_size");
  if (c.suite_size == 0) throw ConfigError("suite_size: must be positive");

  // mu_0
  c.mu0 = file.contains("mu0") ? file["mu0"] : (c.experiment == "breakdown" ? json{{"density", {{"mean", 1.0}}}}
                                                                              : default_mu0(c.alpha));
  if (!c.mu0.is_object()) throw ConfigError("mu0: expected an object");
  for (const auto& [k, v] : c.mu0.items()) {
    if (k != "atoms" && k != "weights" && k != "evenly_spaced" && k != "density") {
      throw ConfigError("mu0: unknown key \"" + k + "\"");
    }
  }
  const int kinds = static_cast<int>(c.mu0.contains("atoms")) + static_cast<int>(c.mu0.contains("evenly_spaced")) +
                    static_cast<int>(c.mu0.contains("density"));
  if (kinds != 1) throw ConfigError("mu0: give exactly one of atoms, evenly_spaced, density");
  if (c.mu0.contains("weights") && !c.mu0.contains("atoms")) throw ConfigError("mu0: weights need atoms");
  try {
    if (mu0_is_density(c)) {
      (void)detail::function_from_json(c.mu0["density"], "mu0.density");
    } else {
      (void)weighted_mu0(c);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("mu0: ") + e.what());
  }

  // experiment-specific constraints
  const bool particles = c.experiment == "duality" || c.experiment == "martingale";
  if (particles) {
    if (mu0_is_density(c) || c.mu0.contains("weights")) throw ConfigError("mu0: particle experiments need equal-weight atoms");
    const auto n = empirical_mu0(c).size();
    if (!detail::is_integer(c.alpha) || static_cast<std::size_t>(c.alpha) != n) {
      throw ConfigError("alpha: particle experiments need alpha equal to the number of atoms (" + std::to_string(n) +
                        "); no solution exists otherwise");
    }
  }
  if (c.experiment == "breakdown" && !mu0_is_density(c)) throw ConfigError("mu0: breakdown needs a density");

  if (file.contains("functions")) {
    const auto& fs = file["functions"];
    if (!fs.is_array() || fs.empty()) throw ConfigError("functions: expected a nonempty array");
    for (std::size_t i = 0; i < fs.size(); ++i) c.functions.push_back(detail::function_from_json(fs[i], "functions[" + std::to_string(i) + "]"));
  } else if (c.experiment == "duality") {
    c.functions = default_test_functions();
  } else if (c.experiment == "martingale") {
    c.functions = {FourierFunction::cosine(1, 1.0), FourierFunction(0.0, {0.5}, {0.0, 0.7})};
  }
  if (c.experiment == "duality") {
    for (const auto& f : c.functions) {
      if (extrema(f).min < 0.0) throw ConfigError("functions: duality test functions must be nonnegative");
    }
  }

  if (file.contains("set")) {
    const auto& s = file["set"];
    if (!s.is_array() || s.empty()) throw ConfigError("set: expected a nonempty array of [lo, hi] arcs");
    for (const auto& arc : s) {
      if (!arc.is_array() || arc.size() != 2) throw ConfigError("set: each arc is [lo, hi]");
      c.set.push_back(Interval{arc[0].get<double>(), arc[1].get<double>()});
    }
  } else {
    c.set = {Interval{0.25, 0.75}};
  }
  if (c.experiment == "pgf") {
    try {
      (void)OccupationFunction::build(TorusDomain(c.grid_size), c.set, c.t, c.alpha);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("set: ") + e.what());
    }
  }
  return c;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["alpha"] = c.alpha;
  j["t"] = c.t;
  j["times"] = c.times;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["grid_size"] = c.grid_size;
  j["output_path"] = c.output_path;
  j["mu0"] = c.mu0;
  json fs = json::array();
  for (const auto& f : c.functions) fs.push_back(detail::function_to_json(f));
  if (!fs.empty()) j["functions"] = fs;
  json arcs = json::array();
  for (const auto& iv : c.set) arcs.push_back({iv.lo, iv.hi});
  j["set"] = arcs;
  j["order"] = c.order;
  j["steps"] = c.steps;
  j["dt_fraction"] = c.dt_fraction;
  j["noise_scale"] = c.noise_scale;
  j["max_steps"] = c.max_steps;
  j["suite_size"] = c.suite_size;
  return j;
}

}  // namespace dklab::cli
