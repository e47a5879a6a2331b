#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "CLI11.hpp"

#include "cpdy/cli.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"cpdy: cyber-physical Dolev-Yao security checker"};
  app.require_subcommand(1);

  cpdy::RunConfig cfg;
  std::string profile = "cpdy";
  std::string format = "text";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", cfg.spec_path, "Specification file")->required();
    sub->add_option("--profile", profile, "Attacker profile: dy or cpdy")
        ->check(CLI::IsMember({"dy", "dy_only", "cpdy"}));
    sub->add_option("--bound", cfg.bound, "Maximum trace length")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--workers", cfg.workers, "Parallel search workers")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Search for a goal violation");
  add_common(check);
  check->add_flag("--compare", cfg.compare, "Run dy and cpdy and print the verdict matrix");
  check->add_flag("--stats", cfg.stats, "Print states explored and timing on stderr");

  auto* replay = app.add_subcommand("replay", "Re-execute a JSON attack trace");
  add_common(replay);
  replay->add_option("trace", cfg.trace_path, "Trace file written by check --format json")
      ->required();

  auto* validate = app.add_subcommand("validate", "Report specification diagnostics");
  validate->add_option("spec", cfg.spec_path, "Specification file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cpdy::exit_diagnostics;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.profile = cpdy::profile_from_string(profile);
  cfg.format = format == "json" ? cpdy::OutputFormat::json : cpdy::OutputFormat::text;
  cfg.color = std::getenv("CPDY_NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
  return cpdy::run(cfg, std::cout, std::cerr);
}
