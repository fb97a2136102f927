#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isogap/cli.hpp"
#include "isogap/errors.hpp"
#include "isogap/io.hpp"

int main(int argc, char** argv) {
  using namespace isogap;

  CLI::App app{"Averaging operators, gap profiles, and local-gap estimates "
               "for finitely supported isometry measures"};
  app.require_subcommand(1);

  struct {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
  } flags;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"rotation-gap", "band-limited spectral gap of the rotation part"},
      {"profile", "norm profile r -> ||S_r|| with fitted gap constants"},
      {"verify", "admissibility preflights and inequality battery"},
      {"reduce", "truncate, center, and power a measure; transfer checks"},
      {"lsg", "local-gap Rayleigh estimate over a region"},
      {"oracle", "closed-form column checks of the assembled operator"},
  };
  for (const auto& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    sub->add_option("--config", flags.config, "job config JSON path")->required();
    sub->add_option("--out", flags.out, "override the output directory");
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--threads", flags.threads, "override the worker count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << error_json(UsageError("bad-arguments", e.what())) << std::endl;
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    JobConfig config = load_job_config(flags.config);
    if (config.command != sub->get_name())
      throw UsageError("command-mismatch",
                       "config says \"" + config.command + "\" but the " +
                           sub->get_name() + " command was invoked");
    if (sub->count("--out")) config.output_dir = flags.out;
    if (sub->count("--seed")) config.seed = flags.seed;
    if (sub->count("--threads")) {
      if (flags.threads < 1)
        throw UsageError("bad-config", "threads must be >= 1");
      config.threads = flags.threads;
    }
    return run_job(config, std::cout);
  } catch (const Error& e) {
    std::cout << error_json(e) << std::endl;
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cout << error_json(NumericalError("unhandled", e.what())) << std::endl;
    return 4;
  }
}
