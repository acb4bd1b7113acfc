#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "ewa_agg/cli.hpp"

int main(int argc, char** argv) {
  using namespace ewa_agg::cli;

  CLI::App app{"Exponentially weighted aggregation: simulation and oracle-inequality checks"};
  app.require_subcommand(1);

  CliCommand command;
  std::string output;
  std::uint64_t seed = 0;
  std::string format = "csv";

  const std::pair<Subcommand, const char*> subs[] = {
      {Subcommand::simulate, "Monte Carlo risk at the configured beta"},
      {Subcommand::certify, "risk check at the family's beta threshold"},
      {Subcommand::verify_coupling, "check the noise coupling over an alpha grid"},
      {Subcommand::verify_bernstein, "check the Bernstein MGF bound over an alpha grid"},
      {Subcommand::dv_check, "perturbation test of posterior-weight minimality"},
      {Subcommand::oracle_bound, "finite-dictionary and Gibbs oracle bounds"},
  };
  for (const auto& [sub, help] : subs) {
    CLI::App* cmd = app.add_subcommand(std::string(to_string(sub)), help);
    cmd->add_option("config", command.config_path, "experiment config (JSON)")->required();
    cmd->add_option("-o,--output", output, "write the report here instead of stdout");
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("-f,--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->callback([&command, sub] { command.subcommand = sub; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--output") > 0) command.output_path = output;
    if (sub->count("--seed") > 0) command.seed_override = seed;
  }
  command.format = format == "json" ? Format::json : Format::csv;
  return run(command, std::cout, std::cerr);
}
