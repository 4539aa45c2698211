#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tailgate/error.hpp"
#include "tailgate/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tailgate: heavy-tail index experiments on a trained ReLU gate"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool ci_scale = false;

  const char* descriptions[][2] = {
      {"validate-estimator", "Hill estimator on stable-law draws of known alpha"},
      {"realizable-sweep", "alpha-hat over dims, batch or eta with a ReLU teacher"},
      {"classification-sweep", "alpha-hat over dims, batch or eta on a Gaussian mixture"},
      {"single-run", "one training run with its error trace"},
      {"stability-check", "KS test of sum of m copies against m^(1/alpha) X"},
  };
  for (const auto& [name, help] : descriptions) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output CSV path (overrides the config)");
    sub->add_flag("--ci-scale", ci_scale, "k1 = k2 = 10");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto spec = tailgate::parse_config(config, tailgate::parse_kind(command));
    if (seed) spec.seed = *seed;
    if (out) spec.out = *out;
    if (ci_scale) tailgate::apply_ci_scale(spec);
    tailgate::validate(spec);
    tailgate::run_experiment(spec, std::cout);
  } catch (const tailgate::EnsembleError& e) {
    std::cerr << "tailgate " << command << ": " << e.what() << '\n';
    std::cerr << "failed runs:";
    for (auto r : e.failed_runs()) std::cerr << ' ' << r;
    std::cerr << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tailgate " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
