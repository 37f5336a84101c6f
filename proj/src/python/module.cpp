#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/parser.hpp"
#include "ccx/engine/solver.hpp"
#include "ccx/harness/harness.hpp"
#include "ccx/llm/prompts.hpp"
#include "ccx/oracle/oracle.hpp"

namespace py = pybind11;

namespace {

ccx::engine::Limits limits_of(std::uint64_t max_steps, std::uint32_t max_depth) {
  ccx::engine::Limits l;
  l.max_steps = max_steps;
  l.max_depth = max_depth;
  return l;
}

std::string solve(const std::string& policy_source, const std::string& query_source, std::uint64_t max_steps,
                  std::uint32_t max_depth) {
  const auto limits = limits_of(max_steps, max_depth);
  try {
    auto policy = ccx::engine::parse_program(policy_source);
    const auto query = ccx::engine::parse_query(query_source);
    policy.append(query.prelude);
    auto loaded = ccx::engine::consult(policy, limits);
    return ccx::engine::describe(loaded.fatal ? *loaded.fatal : ccx::engine::solve(loaded.kb, query.goal, limits));
  } catch (const ccx::engine::ParseError&) {
    return "error(parse)";
  }
}

std::string run_trial_json(const std::string& policy, const std::vector<std::string>& queries, std::uint64_t max_steps,
                           std::uint32_t max_depth) {
  const auto t = ccx::harness::run_trial(policy, queries, ccx::oracle::gold_benchmark(), limits_of(max_steps, max_depth));
  return nlohmann::json(t).dump();
}

std::string replay_json(const std::string& dir, int n_trials, int jobs) {
  ccx::harness::BenchmarkOptions opts;
  opts.n_trials = n_trials;
  opts.jobs = jobs;
  py::gil_scoped_release release;
  return ccx::harness::summary_json(ccx::harness::replay_benchmark(dir, opts)).dump();
}

py::tuple aggregate(const std::vector<int>& scores) {
  const auto a = ccx::harness::aggregate(scores);
  return py::make_tuple(a.mean, a.stderr_value);
}

bool claim_covered_json(const std::string& scenario) {
  try {
    return ccx::oracle::claim_covered(nlohmann::json::parse(scenario).get<ccx::oracle::ClaimScenario>());
  } catch (const std::runtime_error& e) {
    throw py::value_error(e.what());
  }
}

std::string validate_json(const std::string& source) {
  return nlohmann::json(ccx::analysis::validate_source(source)).dump();
}

std::string rule_graph_dot(const std::string& source) {
  return ccx::analysis::emit_dot(ccx::analysis::build_rule_graph(ccx::engine::parse_program(source)));
}

}  // namespace

PYBIND11_MODULE(_ccx, m) {
  m.doc() = "Native core: logic engine, contract oracle, analysis and benchmark harness.";
  py::register_exception<ccx::engine::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ccx::harness::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<nlohmann::json::exception>(m, "JsonError", PyExc_ValueError);

  m.def("solve", &solve, py::arg("policy"), py::arg("query"), py::arg("max_steps") = 1'000'000,
        py::arg("max_depth") = 10'000, "Outcome text for a query file or goal run against a policy.");
  m.def("run_trial_json", &run_trial_json, py::arg("policy"), py::arg("queries"), py::arg("max_steps") = 1'000'000,
        py::arg("max_depth") = 10'000);
  m.def("replay_json", &replay_json, py::arg("dir"), py::arg("n_trials") = 1, py::arg("jobs") = 1);
  m.def("aggregate", &aggregate, py::arg("scores"), "(mean, standard error) of trial scores.");
  m.def("claim_covered_json", &claim_covered_json, py::arg("scenario"));
  m.def("validate_json", &validate_json, py::arg("source"));
  m.def("rule_graph_dot", &rule_graph_dot, py::arg("source"));
  m.def("render_policy_prompt", &ccx::llm::render_policy_prompt, py::arg("contract"));
  m.def("render_query_prompt", &ccx::llm::render_query_prompt, py::arg("question"), py::arg("contract"),
        py::arg("policy"));
  m.def("extract_code", &ccx::llm::extract_code, py::arg("response"));
  m.def("contract_text", [] { return std::string(ccx::oracle::contract_text()); });
  m.def("gold_json", [] { return ccx::oracle::gold_to_json(ccx::oracle::gold_benchmark()); });
}
