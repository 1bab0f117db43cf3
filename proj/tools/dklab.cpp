// dklab: command-line front end for the numerical lab.
//
//   dklab duality --alpha 2 --replicates 20000 --out duality.csv
//   dklab pgf --config configs/pgf_alpha_1_5.json
//   dklab replay duality.csv.manifest.json
//
// Exit codes: 0 pass, 1 usage, 2 statistical failure (or replay mismatch), 3 I/O.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "dklab/cli/config.hpp"
#include "dklab/cli/run.hpp"

namespace {

using namespace dklab::cli;

struct RawFlags {
  std::string config;
  std::optional<double> alpha;
  std::optional<double> t;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::string> out;
};

void add_run_flags(CLI::App* sub, RawFlags& f) {
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--alpha", f.alpha, "diffusivity / mass parameter alpha");
  sub->add_option("--t", f.t, "time horizon");
  sub->add_option("--replicates", f.replicates, "Monte Carlo replicates (ensemble members for breakdown)");
  sub->add_option("--seed", f.seed, "root seed");
  sub->add_option("--grid", f.grid, "grid size (power of two)");
  sub->add_option("--out", f.out, "results table path; the manifest goes next to it");
}

int run_subcommand(const std::string& name, const RawFlags& raw) {
  const json file = raw.config.empty() ? json::object() : load_config_file(raw.config);
  const FlagOverrides flags{raw.alpha, raw.t, raw.replicates, raw.seed, raw.grid, raw.out};
  const RunConfig cfg = resolve_config(name, file, flags);
  const RunOutcome out = run_and_write(cfg);
  std::cout << name << ": " << (out.exit_code == kPass ? "ok" : "statistical failure");
  if (out.summary.contains("verdict")) std::cout << " (verdict " << out.summary["verdict"].get<std::string>() << ")";
  std::cout << " -> " << cfg.output_path << '\n';
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dean-Kawasaki numerical lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RawFlags raw;
  std::string manifest;
  for (const auto& name : experiments()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_run_flags(sub, raw);
  }
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest and diff its results table byte for byte");
  replay_cmd->add_option("manifest", manifest, "manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (replay_cmd->parsed()) {
      const auto r = replay(manifest);
      if (r.identical) {
        std::cout << "replay: identical " << r.results_path << '\n';
        return kPass;
      }
      std::cerr << "replay: " << r.results_path << " differs at byte " << r.first_difference << '\n';
      return kStatisticalFail;
    }
    for (const auto& name : experiments()) {
      if (app.got_subcommand(name)) return run_subcommand(name, raw);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
