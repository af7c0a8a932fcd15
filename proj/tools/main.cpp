#include <iostream>

#include "CLI11.hpp"
#include "chainmi/error.hpp"
#include "commands.hpp"

using namespace chainmi::cli;

namespace {

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Base seed for every Monte-Carlo stream");
  cmd->add_option("--samples", f.samples, "Monte-Carlo sample count");
  cmd->add_option("--tol", f.tol, "Tail tolerance for truncated series");
  cmd->add_option("--kmax", f.kmax, "Deepest resolution level");
  cmd->add_option("--out", f.out, "Output directory (stdout when omitted)");
  cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chained mutual information bounds: evaluation and Monte-Carlo checks"};
  app.require_subcommand(1);

  Flags f;
  std::vector<std::string> epsilons;
  auto* example1 = app.add_subcommand("example1", "Noisy argmax on the circle, with golden checks");
  add_common(example1, f);
  example1->add_option("--epsilons", epsilons, "Noise levels, e.g. 1/20,0.01")->delimiter(',');
  auto* bounds = app.add_subcommand("bounds", "Evaluate the bounds listed in a config");
  add_common(bounds, f);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo statistics and bound comparisons");
  add_common(simulate, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (example1->parsed()) {
      Settings defaults;
      defaults.samples = 1000000;
      return run_example1(resolve(f, defaults), epsilons);
    }
    if (!f.config) throw ConfigError("--config is required");
    if (bounds->parsed()) return run_bounds(resolve(f, Settings{}));
    return run_simulate(resolve(f, Settings{}));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const chainmi::Error& e) {
    std::cerr << "input error: " << e.what() << '\n';
  } catch (const nlohmann::ordered_json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
  }
  return kExitConfig;
}
