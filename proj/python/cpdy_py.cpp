#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "cpdy/knowledge.hpp"
#include "cpdy/search.hpp"
#include "cpdy/spec.hpp"

namespace py = pybind11;
using namespace cpdy;

namespace {

std::set<Term> terms(const std::vector<std::string>& texts)
{
  std::set<Term> out;
  for (const auto& t : texts) out.insert(parse_term(t));
  return out;
}

py::list diagnostics(const std::vector<Diagnostic>& diags)
{
  py::list out;
  for (const auto& d : diags) {
    py::dict e;
    e["severity"] = d.severity == Diagnostic::Severity::error ? "error" : "warning";
    e["kind"] = std::string(to_string(d.kind));
    e["line"] = d.line;
    e["column"] = d.column;
    e["message"] = d.message;
    out.append(e);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_cpdy, m)
{
  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<ReplayMismatch>(m, "ReplayMismatch", PyExc_RuntimeError);

  m.def("normalize_term", [](const std::string& t) { return parse_term(t).text(); });
  m.def("derivable", [](const std::vector<std::string>& k, const std::string& t) {
    return derivable(KnowledgeSet(terms(k)), parse_term(t));
  });
  m.def("analyze", [](const std::vector<std::string>& k) {
    KnowledgeSet closed = analyze(KnowledgeSet(terms(k)));
    std::vector<std::string> out;
    for (const auto& t : closed.terms()) out.push_back(t.text());
    return out;
  });

  m.def("validate", [](const std::string& source) {
    try {
      return diagnostics(validate(parse_unchecked(source)));
    } catch (const SpecError& e) {
      return diagnostics(e.diagnostics());
    }
  });
  m.def("print_spec", [](const std::string& source) { return print_spec(parse(source)); });

  m.def(
      "check_json",
      [](const std::string& source, const std::string& profile, std::size_t bound, unsigned workers) {
        SystemSpec spec = parse(source);
        CheckOptions o;
        o.bound = bound;
        o.workers = workers;
        Verdict v;
        {
          py::gil_scoped_release release;
          v = check(spec, profile_from_string(profile), o);
        }
        return verdict_to_json(v).dump();
      },
      py::arg("source"), py::arg("profile") = "cpdy", py::arg("bound") = 64, py::arg("workers") = 1);
  m.def("check_text", [](const std::string& source, const std::string& profile, std::size_t bound) {
    SystemSpec spec = parse(source);
    return render_text(check(spec, profile_from_string(profile), bound), spec, false);
  }, py::arg("source"), py::arg("profile") = "cpdy", py::arg("bound") = 64);
  m.def("replay_json", [](const std::string& source, const std::string& trace) {
    return replay(nlohmann::ordered_json::parse(trace), parse(source));
  });
}
