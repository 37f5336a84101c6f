#include "ccx/harness/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ccx/engine/parser.hpp"
#include "ccx/llm/prompts.hpp"

namespace ccx::harness {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::string trial_name(int k) { return "trial_" + std::to_string(k); }

QueryResult score(int id, Outcome outcome, Answer gold, std::uint64_t steps, std::string message) {
  QueryResult r;
  r.query_id = id;
  r.gold = gold;
  r.correct = outcome.matches(gold);
  r.outcome = std::move(outcome);
  r.steps_used = steps;
  r.message = std::move(message);
  return r;
}

// Runs `work(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& work) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);
}

engine::Program without_predicates(const engine::Program& p, const engine::Program& overrides) {
  std::set<engine::PredicateIndicator> drop;
  for (const auto& pred : overrides.predicates()) drop.insert(pred.indicator);
  engine::Program out;
  for (const auto& pi : p.dynamic_decls()) out.declare_dynamic(pi);
  const auto& order = p.load_order();
  std::size_t next = 0;
  auto add_until = [&](std::size_t mark) {
    for (; next < mark && next < order.size(); ++next) {
      if (!drop.count(engine::indicator_of(order[next]->head))) out.add_clause(order[next]);
    }
  };
  for (std::size_t i = 0; i < p.directives().size(); ++i) {
    add_until(p.clauses_before_directive(i));
    out.add_directive(p.directives()[i]);
  }
  add_until(order.size());
  return out;
}

void check_options(const BenchmarkOptions& opts) {
  if (opts.n_trials < 1) throw ConfigError("number of trials must be at least 1");
  if (opts.jobs < 1) throw ConfigError("jobs must be at least 1");
}

void check_gold(std::span<const GoldQuery> gold) {
  if (gold.size() != kQueriesPerTrial) {
    throw ConfigError("gold benchmark must have " + std::to_string(kQueriesPerTrial) + " queries, found " +
                      std::to_string(gold.size()));
  }
}

RunSummary finish(std::string model, std::vector<TrialRecord> trials, const BenchmarkOptions& opts) {
  RunSummary s;
  s.model = std::move(model);
  s.trials = std::move(trials);
  const auto scores = s.scores();
  s.stats = aggregate(scores);
  if (opts.out_dir) write_results(s, *opts.out_dir);
  return s;
}

}  // namespace

Outcome Outcome::from(const engine::SolveOutcome& s) {
  switch (s.status) {
    case engine::SolveStatus::proved: return {Status::yes, {}};
    case engine::SolveStatus::failed: return {Status::no, {}};
    case engine::SolveStatus::error: return error(std::string(engine::to_string(*s.error)));
  }
  return error("unknown");
}

Outcome Outcome::parse(std::string_view text) {
  if (text == "yes") return {Status::yes, {}};
  if (text == "no") return {Status::no, {}};
  if (text.size() > 7 && text.substr(0, 6) == "error(" && text.back() == ')') {
    return error(std::string(text.substr(6, text.size() - 7)));
  }
  throw std::invalid_argument("not an outcome: " + std::string(text));
}

std::string Outcome::to_string() const {
  switch (status) {
    case Status::yes: return "yes";
    case Status::no: return "no";
    case Status::error: return "error(" + error_kind + ")";
  }
  return "error";
}

Aggregate aggregate(std::span<const int> scores) {
  if (scores.empty()) throw std::invalid_argument("aggregate needs at least one score");
  const auto n = static_cast<double>(scores.size());
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  if (scores.size() == 1) return {mean, 0};
  double ss = 0;
  for (int x : scores) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1)) / std::sqrt(n)};
}

std::vector<int> RunSummary::scores() const {
  std::vector<int> out;
  for (const auto& t : trials) out.push_back(t.score);
  return out;
}

TrialRecord run_trial(const std::string& policy_code, std::span<const std::string> query_codes,
                      std::span<const GoldQuery> gold, const engine::Limits& limits, std::string trial_id,
                      std::string model_name, Combination combination) {
  check_gold(gold);
  if (query_codes.size() != gold.size()) {
    throw ConfigError("expected " + std::to_string(gold.size()) + " query encodings, got " +
                      std::to_string(query_codes.size()));
  }
  TrialRecord t;
  t.trial_id = std::move(trial_id);
  t.model_name = std::move(model_name);
  t.policy_code = policy_code;
  t.query_codes.assign(query_codes.begin(), query_codes.end());

  engine::Program policy;
  try {
    policy = engine::parse_program(policy_code);
    t.policy_validation = analysis::validate(policy);
  } catch (const engine::ParseError& e) {
    t.policy_validation.parse_ok = false;
    t.policy_validation.parse_error = e.what();
    for (std::size_t i = 0; i < gold.size(); ++i) {
      t.results.push_back(score(gold[i].id, Outcome::error("parse"), gold[i].gold, 0, e.what()));
    }
    return t;
  }

  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = gold[i];
    engine::QueryFile query;
    try {
      query = engine::parse_query(query_codes[i]);
    } catch (const engine::ParseError& e) {
      t.results.push_back(score(g.id, Outcome::error("parse"), g.gold, 0, e.what()));
      continue;
    }
    engine::Program combined =
        combination == Combination::replace ? without_predicates(policy, query.prelude) : policy;
    combined.append(query.prelude);
    auto loaded = engine::consult(combined, limits);
    const auto solved = loaded.fatal ? *loaded.fatal : engine::solve(loaded.kb, query.goal, limits);
    t.results.push_back(score(g.id, Outcome::from(solved), g.gold, solved.steps_used, solved.message));
  }
  for (const auto& r : t.results) t.score += r.correct ? 1 : 0;
  return t;
}

std::vector<GoldQuery> load_gold(const fs::path& dir) {
  const auto path = dir / "gold.json";
  if (!fs::exists(path)) return oracle::gold_benchmark();
  try {
    return oracle::gold_from_json(read_file(path));
  } catch (const std::runtime_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunSummary replay_benchmark(const fs::path& dir, const BenchmarkOptions& opts) {
  check_options(opts);
  if (!fs::is_directory(dir)) throw ConfigError("replay directory not found: " + dir.string());
  const auto gold = load_gold(dir);
  check_gold(gold);

  const bool per_trial = fs::is_directory(dir / trial_name(1));
  struct Inputs {
    std::string policy;
    std::vector<std::string> queries;
  };
  auto load = [&](const fs::path& trial_dir) {
    Inputs in;
    in.policy = read_file(trial_dir / "policy.pl");
    for (int q = 1; q <= kQueriesPerTrial; ++q) {
      const auto path = trial_dir / "queries" / ("q" + std::to_string(q) + ".pl");
      if (!fs::exists(path)) throw ConfigError("missing query file " + path.string());
      in.queries.push_back(read_file(path));
    }
    return in;
  };

  // Load everything up front so layout problems surface before any work.
  std::vector<Inputs> inputs;
  for (int k = 1; k <= opts.n_trials; ++k) {
    if (per_trial) {
      const auto trial_dir = dir / trial_name(k);
      if (!fs::is_directory(trial_dir)) throw ConfigError("missing trial directory " + trial_dir.string());
      inputs.push_back(load(trial_dir));
    } else if (k == 1) {
      inputs.push_back(load(dir));
    } else {
      inputs.push_back(inputs.front());
    }
  }

  const std::string model = opts.model_name.empty() ? fs::weakly_canonical(dir).filename().string() : opts.model_name;
  std::vector<TrialRecord> trials(static_cast<std::size_t>(opts.n_trials));
  parallel_for(opts.n_trials, opts.jobs, [&](int i) {
    const auto& in = inputs[static_cast<std::size_t>(i)];
    trials[static_cast<std::size_t>(i)] = run_trial(in.policy, in.queries, gold, opts.limits, trial_name(i + 1), model);
  });
  return finish(model, std::move(trials), opts);
}

RunSummary live_benchmark(const Generate& generate, std::string_view contract, std::span<const GoldQuery> gold,
                          const fs::path& run_dir, const BenchmarkOptions& opts) {
  check_options(opts);
  check_gold(gold);
  if (contract.empty()) throw ConfigError("contract text is empty");

  auto persist = [](const fs::path& dir, const std::string& stem, const llm::GenerationRecord& record,
                    const fs::path& code_path) {
    write_file(dir / "generations" / (stem + ".json"), nlohmann::json(record).dump(2) + "\n");
    write_file(code_path, record.extracted_code);
  };

  std::vector<TrialRecord> trials(static_cast<std::size_t>(opts.n_trials));
  parallel_for(opts.n_trials, opts.jobs, [&](int i) {
    const auto trial_id = trial_name(i + 1);
    const auto dir = run_dir / trial_id;
    std::string policy;
    std::vector<std::string> queries;
    try {
      const auto policy_record = generate(llm::render_policy_prompt(contract));
      persist(dir, "policy", policy_record, dir / "policy.pl");
      policy = policy_record.extracted_code;
      if (policy.empty()) throw std::runtime_error("no code could be extracted from the policy response");
      for (const auto& g : gold) {
        const auto record = generate(llm::render_query_prompt(g.question, contract, policy));
        const auto stem = "q" + std::to_string(g.id);
        persist(dir, stem, record, dir / "queries" / (stem + ".pl"));
        queries.push_back(record.extracted_code);
      }
    } catch (const std::exception& e) {
      TrialRecord t;
      t.trial_id = trial_id;
      t.model_name = opts.model_name;
      t.policy_code = policy;
      t.query_codes = queries;
      t.error = e.what();
      for (const auto& g : gold) t.results.push_back(score(g.id, Outcome::error("generation"), g.gold, 0, e.what()));
      trials[static_cast<std::size_t>(i)] = std::move(t);
      return;
    }
    trials[static_cast<std::size_t>(i)] = run_trial(policy, queries, gold, opts.limits, trial_id, opts.model_name);
  });
  return finish(opts.model_name, std::move(trials), opts);
}

void to_json(nlohmann::json& j, const QueryResult& r) {
  j = nlohmann::json{{"id", r.query_id},
                     {"outcome", r.outcome.to_string()},
                     {"gold", oracle::to_string(r.gold)},
                     {"correct", r.correct},
                     {"steps_used", r.steps_used}};
  if (!r.message.empty()) j["message"] = r.message;
}

void to_json(nlohmann::json& j, const TrialRecord& t) {
  j = nlohmann::json{{"trial_id", t.trial_id},
                     {"model_name", t.model_name},
                     {"score", t.score},
                     {"policy_code", t.policy_code},
                     {"policy_validation", t.policy_validation},
                     {"query_codes", t.query_codes},
                     {"results", t.results}};
  if (t.error) j["error"] = *t.error;
}

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : s.trials) {
    nlohmann::json per_query = nlohmann::json::array();
    for (const auto& r : t.results) {
      per_query.push_back(
          {{"id", r.query_id}, {"outcome", r.outcome.to_string()}, {"gold", oracle::to_string(r.gold)}, {"correct", r.correct}});
    }
    nlohmann::json trial{{"trial_id", t.trial_id}, {"score", t.score}, {"per_query", per_query}};
    if (t.error) trial["error"] = *t.error;
    trials.push_back(trial);
  }
  return nlohmann::json{{"model", s.model},
                        {"n_trials", s.trials.size()},
                        {"trials", trials},
                        {"mean", s.stats.mean},
                        {"stderr", s.stats.stderr_value},
                        {"stderr_method", "sample standard deviation (N-1 denominator) divided by sqrt(N)"}};
}

std::string scores_csv(const RunSummary& s) {
  std::string header = "model";
  std::string row = s.model;
  for (std::size_t i = 0; i < s.trials.size(); ++i) {
    header += ",trial_" + std::to_string(i + 1);
    row += "," + std::to_string(s.trials[i].score);
  }
  char stats[64];
  std::snprintf(stats, sizeof stats, ",%.2f,%.2f", s.stats.mean, s.stats.stderr_value);
  return header + ",mean,stderr\n" + row + stats + "\n";
}

std::string table_row(const RunSummary& s) {
  std::string out;
  for (const auto& t : s.trials) {
    if (!out.empty()) out += " ";
    out += std::to_string(t.score);
  }
  char stats[64];
  if (s.trials.size() > 1) {
    std::snprintf(stats, sizeof stats, " | mean %.1f ± %.2f", s.stats.mean, s.stats.stderr_value);
  } else {
    std::snprintf(stats, sizeof stats, " | mean %.1f", s.stats.mean);
  }
  return out + stats;
}

void write_results(const RunSummary& s, const fs::path& dir) {
  write_file(dir / "summary.json", summary_json(s).dump(2) + "\n");
  write_file(dir / "scores.csv", scores_csv(s));
  for (const auto& t : s.trials) write_file(dir / t.trial_id / "record.json", nlohmann::json(t).dump(2) + "\n");
}

}  // namespace ccx::harness
