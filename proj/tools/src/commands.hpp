#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cbfed::cli {

enum ExitCode : int {
  kPass = 0,
  kInternal = 1,
  kInvariantFailure = 2,
  kConfigError = 3,
  kBlowUp = 4,
};

struct Options {
  std::string command;
  std::filesystem::path config;  ///< empty: defaults
  std::filesystem::path out = "runs";
  std::vector<std::string> overrides;
  int threads = 1;
};

const std::vector<std::string>& command_names();

/// Run one command. Artifacts go to out/<config hash>/; a failure also
/// writes failure.json there (or under out/ when the config did not load).
int execute(const Options& opts, std::ostream& log, std::ostream& err);

}  // namespace cbfed::cli
