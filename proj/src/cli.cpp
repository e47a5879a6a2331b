#include "cpdy/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cpdy/search.hpp"
#include "cpdy/spec.hpp"

namespace cpdy {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Timed {
  Verdict verdict;
  double analysis_ms = 0;
};

Timed timed_check(const SystemSpec& spec, Profile p, const RunConfig& c)
{
  CheckOptions o;
  o.bound = c.bound;
  o.workers = c.workers;
  auto t0 = Clock::now();
  Timed t{check(spec, p, o), 0};
  t.analysis_ms = ms_since(t0);
  return t;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& path,
                       std::ostream& err)
{
  for (const auto& d : diags) err << path << ":" << d.text() << "\n";
}

std::string fixed(double v)
{
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << v;
  return o.str();
}

int do_check(const RunConfig& c, const SystemSpec& spec, double parse_ms, std::ostream& out,
             std::ostream& err)
{
  auto t_total = Clock::now();
  if (!c.compare) {
    Timed r = timed_check(spec, c.profile, c);
    if (c.format == OutputFormat::json) {
      out << verdict_to_json(r.verdict).dump(2) << "\n";
    } else {
      out << render_text(r.verdict, spec, c.color);
    }
    if (c.stats)
      err << "states explored: " << r.verdict.states_explored << "\n"
          << "analysis time: " << fixed(r.analysis_ms) << " ms\n"
          << "total time: " << fixed(parse_ms + ms_since(t_total)) << " ms\n";
    return r.verdict.attack ? exit_attack : exit_safe;
  }

  Timed runs[2] = {timed_check(spec, Profile::dy_only, c), timed_check(spec, Profile::cpdy, c)};
  bool any = runs[0].verdict.attack || runs[1].verdict.attack;
  if (c.format == OutputFormat::json) {
    nlohmann::ordered_json j;
    j["spec"] = c.spec_path;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : runs) arr.push_back(verdict_to_json(r.verdict));
    j["runs"] = std::move(arr);
    out << j.dump(2) << "\n";
  } else {
    out << std::left << std::setw(10) << "profile" << std::setw(12) << "attack" << std::setw(10)
        << "states" << "analysis" << "\n";
    for (const auto& r : runs) {
      std::string found = r.verdict.attack ? "found" : "not found";
      std::string pad(12 - found.size(), ' ');
      if (c.color) found = std::string(r.verdict.attack ? "\x1b[31m" : "\x1b[32m") + found + "\x1b[0m";
      out << std::left << std::setw(10) << to_string(r.verdict.profile) << found << pad
          << std::setw(10) << r.verdict.states_explored << fixed(r.analysis_ms) << " ms\n";
    }
  }
  if (c.stats)
    err << "total time: " << fixed(parse_ms + ms_since(t_total)) << " ms\n";
  return any ? exit_attack : exit_safe;
}

int do_replay(const RunConfig& c, const SystemSpec& spec, std::ostream& out, std::ostream& err)
{
  std::ifstream in(c.trace_path);
  if (!in) {
    err << "error: cannot read '" << c.trace_path << "'\n";
    return exit_io;
  }
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    err << c.trace_path << ": " << e.what() << "\n";
    return exit_diagnostics;
  }
  try {
    replay(doc, spec);
  } catch (const ReplayMismatch& e) {
    out << "replay failed at " << e.what() << "\n";
    return exit_attack;
  } catch (const std::exception& e) {
    out << "replay failed: " << e.what() << "\n";
    return exit_attack;
  }
  out << "replay ok: " << doc.at("steps").size() << " steps reproduce a violation of '"
      << doc.value("goal", std::string()) << "'\n";
  return exit_safe;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err)
{
  auto t0 = Clock::now();
  SystemSpec spec;
  std::vector<Diagnostic> warnings;
  try {
    std::ifstream in(c.spec_path);
    if (!in) {
      err << "error: cannot read '" << c.spec_path << "'\n";
      return exit_io;
    }
    std::ostringstream src;
    src << in.rdbuf();
    spec = parse_unchecked(src.str());
    auto diags = validate(spec);
    if (has_errors(diags) || c.command == "validate") {
      print_diagnostics(diags, c.spec_path, err);
      if (c.command == "validate" && !has_errors(diags))
        out << c.spec_path << ": ok (" << diags.size() << " warnings)\n";
      return has_errors(diags) ? exit_diagnostics : exit_safe;
    }
    warnings = std::move(diags);
  } catch (const SpecError& e) {
    print_diagnostics(e.diagnostics(), c.spec_path, err);
    return exit_diagnostics;
  }
  if (c.format == OutputFormat::text) print_diagnostics(warnings, c.spec_path, err);
  double parse_ms = ms_since(t0);

  if (c.bound < 1) {
    err << "error: bound must be at least 1\n";
    return exit_diagnostics;
  }
  try {
    if (c.command == "replay") return do_replay(c, spec, out, err);
    return do_check(c, spec, parse_ms, out, err);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  }
}

}  // namespace cpdy
