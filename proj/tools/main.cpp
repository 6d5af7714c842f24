#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "randcurv/parallel.hpp"
#include "runner/commands.hpp"

int main(int argc, char** argv) {
  using namespace randcurv::cli;
  CLI::App app{"Random conformal metrics: sampling, excursion estimates and bounds", "randcurv"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  app.set_version_flag("--version", RANDCURV_VERSION);
  const std::map<std::string, std::string> about{
      {"sample", "write sampled f, h and the deformed curvature on the grid"},
      {"p2", "Monte Carlo sign-change probability with predictions and bounds"},
      {"euler", "mean Euler characteristic of excursion sets against the prediction"},
      {"linf", "sup-norm deviation probabilities and their log asymptote"},
      {"heat", "heat-kernel sup variance against its small and large T limits"},
      {"bounds", "two-sided bound tables and the positive-curvature constants"},
      {"qsign", "Q-curvature sign bounds (closed form on S^4 or Monte Carlo)"}};
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "INI experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "overrides RANDCURV_SEED and [run] seed");
    sub->add_option("--workers", workers, "threads for Monte Carlo work (0 = all cores)");
    sub->add_option("--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig config = load_config(config_path, command);
    resolve_seed(config, seed);
    const RunRecord rec = run_command(config, {randcurv::resolve_workers(workers), out_dir});
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : rec.files) std::cout << f << '\n';
  } catch (const ConfigError& e) {
    std::cerr << "randcurv " << command << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "randcurv " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
