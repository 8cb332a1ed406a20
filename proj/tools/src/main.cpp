#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace cbfed::cli;
  CLI::App app{"Galerkin experiments for Navier-Stokes flow with nonsmooth damping", "cbfed"};
  app.require_subcommand(1);
  Options opts;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "TOML run configuration (defaults when omitted)");
    sub->add_option("--out", opts.out, "artifact root; runs land in <out>/<config hash>")
        ->capture_default_str();
    sub->add_option("--override", opts.overrides, "dotted.key=value, repeatable")
        ->allow_extra_args(false);
    sub->add_option("--threads", opts.threads, "worker threads (converge)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->callback([&opts, name] { opts.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  return execute(opts, std::cout, std::cerr);
}
