#pragma once

#include <cstddef>
#include <ostream>
#include <string>

#include "cpdy/rules.hpp"

namespace cpdy {

enum class OutputFormat { text, json };

struct RunConfig {
  /// check, replay or validate.
  std::string command = "check";
  std::string spec_path;
  /// replay: the trace document.
  std::string trace_path;
  Profile profile = Profile::cpdy;
  std::size_t bound = 64;
  OutputFormat format = OutputFormat::text;
  bool compare = false;
  bool stats = false;
  unsigned workers = 1;
  bool color = false;
};

enum ExitCode : int { exit_safe = 0, exit_attack = 1, exit_diagnostics = 2, exit_io = 3 };

/// Runs one command. Reports go to `out`, diagnostics and statistics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace cpdy
