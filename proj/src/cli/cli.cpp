#include "ccx/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/parser.hpp"
#include "ccx/engine/printer.hpp"
#include "ccx/engine/solver.hpp"
#include "ccx/harness/harness.hpp"
#include "ccx/llm/client.hpp"
#include "ccx/llm/prompts.hpp"
#include "ccx/oracle/oracle.hpp"

namespace ccx::cli {

namespace {

namespace fs = std::filesystem;

/// Failure with a message for stderr and an exit code.
struct Failure {
  int code;
  std::string message;
};

std::optional<engine::Limits> parse_limits(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return std::nullopt;
  engine::Limits limits;
  const auto* begin = text.data();
  const auto* mid = begin + comma;
  const auto* end = begin + text.size();
  auto [p1, e1] = std::from_chars(begin, mid, limits.max_steps);
  auto [p2, e2] = std::from_chars(mid + 1, end, limits.max_depth);
  if (e1 != std::errc{} || e2 != std::errc{} || p1 != mid || p2 != end) return std::nullopt;
  if (limits.max_steps == 0 || limits.max_depth == 0) return std::nullopt;
  return limits;
}

std::string read_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitError, "cannot read " + what + " " + path.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Failure{kExitError, "cannot read " + what + " " + path.string()};
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Failure{kExitError, "cannot write " + path.string()};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure{kExitError, "cannot write " + path.string() + ": " + ec.message()};
}

bool same_or_inside(const fs::path& inner, const fs::path& outer) {
  const auto a = fs::weakly_canonical(inner);
  const auto b = fs::weakly_canonical(outer);
  auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  return ib == b.end();
}

std::string compact_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

struct Common {
  std::string config_path;
  std::string limits_text;
  int verbosity = 0;
};

struct Settings {
  engine::Limits limits;
  llm::ModelConfig model;
  int jobs = 1;
};

Settings load_settings(const Common& common) {
  Settings s;
  if (!common.config_path.empty()) {
    const auto text = read_file(common.config_path, "config file");
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Failure{kExitError, "config file " + common.config_path + " is not a JSON object"};
    }
    try {
      s.model = llm::model_config_from_json(j);
      s.limits.max_steps = j.value("max_steps", s.limits.max_steps);
      s.limits.max_depth = j.value("max_depth", s.limits.max_depth);
      s.jobs = j.value("jobs", s.jobs);
    } catch (const std::exception& e) {
      throw Failure{kExitError, "config file " + common.config_path + ": " + e.what()};
    }
  }
  llm::apply_environment(s.model);
  if (!common.limits_text.empty()) s.limits = *parse_limits(common.limits_text);
  return s;
}

void require_key(const llm::ModelConfig& cfg) {
  if (cfg.api_key.empty()) throw Failure{kExitError, "no API key: set CCX_API_KEY"};
}

engine::Program load_policy(const std::string& path, std::ostream& out) {
  const auto source = read_file(path, "policy file");
  try {
    return engine::parse_program(source);
  } catch (const engine::ParseError& e) {
    out << "error(parse)\n";
    throw Failure{kExitError, path + ": " + e.what()};
  }
}

void print_bindings(const engine::SolveOutcome& s, std::ostream& out) {
  for (const auto& b : s.bindings) out << b.name << " = " << engine::to_string(b.value) << "\n";
}

engine::SolveOutcome run_goal(const engine::Program& policy, const engine::QueryFile& q, const engine::Limits& limits,
                              std::ostream& err) {
  engine::Program combined = policy;
  combined.append(q.prelude);
  auto loaded = engine::consult(combined, limits);
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
  return loaded.fatal ? *loaded.fatal : engine::solve(loaded.kb, q.goal, limits);
}

// encode

struct EncodeArgs {
  std::string contract;
  std::string model;
  std::string out;
  std::string record;
};

int cmd_encode(const EncodeArgs& a, const Settings& base, std::ostream& out, std::ostream& err) {
  Settings s = base;
  if (!a.model.empty()) s.model.model_name = a.model;
  if (!a.out.empty() && !a.contract.empty() && same_or_inside(a.out, a.contract)) {
    throw Failure{kExitUsage, "--out must not overwrite the contract file"};
  }
  require_key(s.model);
  const std::string contract = a.contract.empty() ? std::string(oracle::contract_text())
                                                  : read_file(a.contract, "contract file");
  llm::GenerationRecord record;
  try {
    llm::Client client(s.model);
    record = client.complete(llm::render_policy_prompt(contract));
  } catch (const llm::LlmError& e) {
    throw Failure{kExitError, std::string(llm::to_string(e.kind())) + " error: " + e.what()};
  }
  if (!a.record.empty()) write_file(a.record, nlohmann::json(record).dump(2) + "\n");
  if (record.extracted_code.empty()) throw Failure{kExitError, "response contained no code"};

  const auto report = analysis::validate_source(record.extracted_code);
  std::ostream& report_stream = a.out.empty() ? err : out;
  if (a.out.empty()) {
    out << record.extracted_code;
    if (record.extracted_code.back() != '\n') out << "\n";
  } else {
    write_file(a.out, record.extracted_code + (record.extracted_code.back() == '\n' ? "" : "\n"));
  }
  if (!report.parse_ok) throw Failure{kExitError, "generated code does not parse: " + report.parse_error};
  report_stream << analysis::summarize(report);
  return report.has_findings() ? kExitFindings : kExitOk;
}

// query

struct QueryArgs {
  std::string policy;
  std::string query;
  std::string goal;
};

int cmd_query(const QueryArgs& a, const Settings& s, std::ostream& out, std::ostream& err) {
  const auto policy = load_policy(a.policy, out);
  engine::QueryFile q;
  try {
    if (!a.query.empty()) {
      q = engine::parse_query(read_file(a.query, "query file"));
    } else {
      q.goal = engine::parse_goal(a.goal);
    }
  } catch (const engine::ParseError& e) {
    out << "error(parse)\n";
    throw Failure{kExitError, e.what()};
  }
  const auto result = run_goal(policy, q, s.limits, err);
  out << engine::describe(result) << "\n";
  if (result.proved()) print_bindings(result, out);
  if (result.is_error()) {
    err << result.message << "\n";
    return kExitError;
  }
  return kExitOk;
}

// validate

struct ValidateArgs {
  std::string policy;
  bool json = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const auto report = analysis::validate_source(read_file(a.policy, "policy file"));
  if (a.json) {
    out << nlohmann::json(report).dump(2) << "\n";
  } else {
    out << analysis::summarize(report);
  }
  if (!report.parse_ok) return kExitError;
  return report.has_findings() ? kExitFindings : kExitOk;
}

// graph

struct GraphArgs {
  std::string policy;
  std::string format = "dot";
  std::string out;
};

int cmd_graph(const GraphArgs& a, std::ostream& out) {
  if (!a.out.empty() && same_or_inside(a.out, a.policy)) {
    throw Failure{kExitUsage, "--out must not overwrite the policy file"};
  }
  const auto policy = load_policy(a.policy, out);
  const auto dot = analysis::emit_dot(analysis::build_rule_graph(policy));
  if (a.out.empty()) {
    out << dot;
  } else {
    write_file(a.out, dot);
  }
  return kExitOk;
}

// bench

struct BenchArgs {
  int trials = 1;
  int jobs = 0;
  std::string model;
  std::string replay;
  std::string out;
  std::string contract;
};

void report_trials(const harness::RunSummary& summary, int verbosity, std::ostream& err) {
  for (const auto& t : summary.trials) {
    if (t.error) err << t.trial_id << ": " << *t.error << "\n";
    if (verbosity > 0) {
      err << t.trial_id << ": score " << t.score << " (";
      for (std::size_t i = 0; i < t.results.size(); ++i) {
        err << (i ? " " : "") << t.results[i].outcome.to_string();
      }
      err << ")\n";
    }
  }
}

int cmd_bench(const BenchArgs& a, const Settings& base, int verbosity, std::ostream& out, std::ostream& err) {
  if (a.model.empty() == a.replay.empty()) throw Failure{kExitUsage, "bench needs exactly one of --model or --replay"};
  Settings s = base;
  harness::BenchmarkOptions opts;
  opts.n_trials = a.trials;
  opts.jobs = a.jobs > 0 ? a.jobs : s.jobs;
  opts.limits = s.limits;

  harness::RunSummary summary;
  if (!a.replay.empty()) {
    if (!a.out.empty()) {
      if (same_or_inside(a.out, a.replay)) throw Failure{kExitUsage, "--out must be outside the replay directory"};
      opts.out_dir = a.out;
    }
    summary = harness::replay_benchmark(a.replay, opts);
  } else {
    s.model.model_name = a.model;
    opts.model_name = a.model;
    require_key(s.model);
    const fs::path run_dir = a.out.empty() ? fs::path("runs") / (a.model + "-" + compact_timestamp()) : fs::path(a.out);
    if (!a.contract.empty() && same_or_inside(run_dir, a.contract)) {
      throw Failure{kExitUsage, "--out must not overwrite the contract file"};
    }
    const std::string contract = a.contract.empty() ? std::string(oracle::contract_text())
                                                    : read_file(a.contract, "contract file");
    opts.out_dir = run_dir;
    llm::Client client(s.model);
    const auto gold = oracle::gold_benchmark();
    summary = harness::live_benchmark([&client](const std::string& prompt) { return client.complete(prompt); },
                                      contract, gold, run_dir, opts);
    err << "run directory: " << run_dir.string() << "\n";
  }
  report_trials(summary, verbosity, err);
  out << harness::table_row(summary) << "\n";
  const bool all_failed = std::all_of(summary.trials.begin(), summary.trials.end(),
                                      [](const harness::TrialRecord& t) { return t.error.has_value(); });
  return all_failed ? kExitError : kExitOk;
}

// repl

int cmd_repl(const std::string& policy_path, const Settings& s, std::istream& in, std::ostream& out,
             std::ostream& err, bool interactive) {
  const auto policy = load_policy(policy_path, out);
  auto loaded = engine::consult(policy, s.limits);
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
  if (loaded.fatal) {
    out << engine::describe(*loaded.fatal) << "\n";
    throw Failure{kExitError, loaded.fatal->message};
  }
  std::string line;
  while (true) {
    if (interactive) out << "?- " << std::flush;
    if (!std::getline(in, line)) break;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const auto text = line.substr(first, last - first + 1);
    if (text == ":quit" || text == ":q") return kExitOk;
    if (text == ":graph") {
      out << analysis::emit_dot(analysis::build_rule_graph(policy));
      continue;
    }
    if (text == ":help") {
      out << "enter a goal, :graph for the rule graph, :quit to leave\n";
      continue;
    }
    engine::Query goal;
    try {
      goal = engine::parse_goal(text);
    } catch (const engine::ParseError& e) {
      out << "error(parse): " << e.what() << "\n";
      continue;
    }
    const auto result = engine::solve(loaded.kb, goal, s.limits);
    out << engine::describe(result);
    if (result.is_error() && !result.message.empty()) out << ": " << result.message;
    out << "\n";
    if (result.proved()) print_bindings(result, out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        bool interactive) {
  CLI::App app{"Computable insurance contracts: encode, query, validate, graph, benchmark", "ccx"};
  app.fallthrough();
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--limits", common.limits_text, "engine caps as MAX_STEPS,MAX_DEPTH")
      ->check([](const std::string& v) {
        return parse_limits(v) ? std::string() : std::string("expected two positive integers N,M");
      });
  app.add_flag("-v,--verbose", common.verbosity, "more diagnostics on stderr");

  EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "generate a policy encoding from the contract");
  encode_cmd->add_option("--contract", encode.contract, "contract text file (default: built-in)");
  encode_cmd->add_option("--model", encode.model, "model name");
  encode_cmd->add_option("--out", encode.out, "write the encoding here instead of stdout");
  encode_cmd->add_option("--record", encode.record, "write the generation record JSON here");

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "run one query against a policy");
  query_cmd->add_option("--policy", query.policy, "policy file")->required();
  auto* query_file = query_cmd->add_option("--query", query.query, "query file");
  auto* goal_text = query_cmd->add_option("--goal", query.goal, "goal text");
  query_file->excludes(goal_text);
  goal_text->excludes(query_file);

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "report undefined, unreachable and singleton issues");
  validate_cmd->add_option("--policy", validate.policy, "policy file")->required();
  validate_cmd->add_flag("--json", validate.json, "JSON report");

  GraphArgs graph;
  auto* graph_cmd = app.add_subcommand("graph", "emit the rule graph");
  graph_cmd->add_option("--policy", graph.policy, "policy file")->required();
  graph_cmd->add_option("--format", graph.format, "output format")->check(CLI::IsMember({"dot"}));
  graph_cmd->add_option("--out", graph.out, "write here instead of stdout");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "score encodings against the gold answers");
  bench_cmd->add_option("--trials", bench.trials, "number of trials")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--jobs", bench.jobs, "trials run in parallel")->check(CLI::PositiveNumber);
  auto* bench_model = bench_cmd->add_option("--model", bench.model, "generate live with this model");
  auto* bench_replay = bench_cmd->add_option("--replay", bench.replay, "replay stored encodings from DIR");
  bench_model->excludes(bench_replay);
  bench_replay->excludes(bench_model);
  bench_cmd->add_option("--out", bench.out, "results directory");
  bench_cmd->add_option("--contract", bench.contract, "contract text file for live runs (default: built-in)");

  std::string repl_policy;
  auto* repl_cmd = app.add_subcommand("repl", "interactive coverage queries");
  repl_cmd->add_option("--policy", repl_policy, "policy file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*query_cmd && query.query.empty() && query.goal.empty()) {
    err << "query needs --query or --goal\n";
    return kExitUsage;
  }

  try {
    const Settings settings = load_settings(common);
    if (*encode_cmd) return cmd_encode(encode, settings, out, err);
    if (*query_cmd) return cmd_query(query, settings, out, err);
    if (*validate_cmd) return cmd_validate(validate, out);
    if (*graph_cmd) return cmd_graph(graph, out);
    if (*bench_cmd) return cmd_bench(bench, settings, common.verbosity, out, err);
    if (*repl_cmd) return cmd_repl(repl_policy, settings, in, out, err, interactive);
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const harness::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const llm::LlmError& e) {
    err << "error: " << llm::to_string(e.kind()) << " error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace ccx::cli
