#include <cstdlib>
#include <iostream>
#include <utility>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

using entforge::cli::Settings;

struct FlagSpec {
  const char* key;
  const char* flag;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"nq", "--nq", "qubit counts, comma separated"},
    {"k_param", "--k-param", "chaos parameter K"},
    {"steps", "--steps", "map steps t (comma list for threshold / calibrate-gamma)"},
    {"eps_grid", "--eps-grid", "noise grid, lo:hi:log:n, lo:hi:lin:n or comma list"},
    {"realizations", "--realizations", "trajectories per point, or 'auto'"},
    {"seed", "--seed", "master seed (falls back to ENTFORGE_SEED)"},
    {"workers", "--workers", "worker threads"},
    {"out", "--out", "output directory"},
    {"haar_samples", "--haar-samples", "Haar states per size (spectrum)"},
    {"fraction", "--fraction", "threshold fraction of the noiseless value"},
    {"bound_kind", "--bound-kind", "lower, upper or both (threshold)"},
    {"initial_momentum", "--initial-momentum", "momentum eigenstate to start from"},
    {"realization_multiplier", "--realization-multiplier", "c in the auto realization rule"},
};

constexpr FlagSpec kSwitches[] = {
    {"strict", "--strict", "exit nonzero on unconverged Monte Carlo or invariant failures"},
    {"refine", "--refine", "simulate once more at each interpolated threshold"},
    {"allow_large_mixed", "--allow-large-mixed", "permit n_q = 10 density-matrix runs"},
};

constexpr std::pair<const char*, const char*> kSubcommands[] = {
    {"generate", "mean bipartite entropy vs t from a momentum eigenstate"},
    {"spectrum", "entanglement spectrum of sawtooth and Haar states"},
    {"noise-sweep", "distillable-entanglement bounds vs noise amplitude"},
    {"threshold", "half-value noise thresholds and their n_q scaling"},
    {"calibrate-gamma", "fit -ln F against eps^2 n_g t"},
    {"validate", "property suite over all modules"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entforge: noisy quantum sawtooth map and entanglement analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(entforge::cli::kVersion));

  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::vector<CLI::App*> subs;
  for (const auto& [name, description] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "flat key = value settings file");
    for (const auto& f : kFlags) sub->add_option(f.flag, values[f.key], f.help);
    for (const auto& f : kSwitches) sub->add_flag(f.flag, switches[f.key], f.help);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  try {
    Settings flags;
    for (const auto& f : kFlags) {
      if (sub->count(f.flag) > 0) flags[f.key] = values[f.key];
    }
    for (const auto& f : kSwitches) {
      if (sub->count(f.flag) > 0) flags[f.key] = "true";
    }
    std::vector<std::string> warnings;
    const Settings file = config_path.empty() ? Settings{} : entforge::cli::read_config_file(config_path);
    const Settings merged = entforge::cli::merge_settings(file, flags, warnings);
    std::optional<std::string> env_seed;
    if (const char* env = std::getenv(entforge::cli::kSeedEnvVar.data())) env_seed = env;
    auto inv = entforge::cli::resolve(sub->get_name(), merged, env_seed);
    inv.warnings = std::move(warnings);
    return entforge::cli::dispatch(inv, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return entforge::cli::kExitError;
  }
}
