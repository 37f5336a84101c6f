#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/solver.hpp"
#include "ccx/llm/client.hpp"
#include "ccx/oracle/oracle.hpp"

namespace ccx::harness {

using oracle::Answer;
using oracle::GoldQuery;

inline constexpr int kQueriesPerTrial = 9;

/// yes, no, or error(kind). Kinds are the engine error kinds plus
/// "generation" for queries whose code could not be produced.
struct Outcome {
  enum class Status : std::uint8_t { yes, no, error };

  Status status = Status::no;
  std::string error_kind;

  static Outcome from(const engine::SolveOutcome& s);
  static Outcome error(std::string kind) { return {Status::error, std::move(kind)}; }
  /// Throws std::invalid_argument on unknown text.
  static Outcome parse(std::string_view text);

  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] bool is_error() const { return status == Status::error; }
  [[nodiscard]] bool matches(Answer gold) const {
    return (status == Status::yes && gold == Answer::yes) || (status == Status::no && gold == Answer::no);
  }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct QueryResult {
  int query_id = 0;
  Outcome outcome;
  Answer gold = Answer::no;
  bool correct = false;
  std::uint64_t steps_used = 0;
  std::string message;  // error detail, if any
};

struct TrialRecord {
  std::string trial_id;
  std::string model_name;
  std::string policy_code;
  analysis::ValidationReport policy_validation;
  std::vector<std::string> query_codes;
  std::vector<QueryResult> results;
  int score = 0;
  /// Set when the trial could not be generated completely.
  std::optional<std::string> error;
};

struct Aggregate {
  double mean = 0;
  double stderr_value = 0;
};

/// Mean and sample standard error (N-1 denominator, divided by sqrt N).
/// A single score has stderr 0. Throws std::invalid_argument when empty.
Aggregate aggregate(std::span<const int> scores);

struct RunSummary {
  std::string model;
  std::vector<TrialRecord> trials;
  Aggregate stats;

  [[nodiscard]] std::vector<int> scores() const;
};

/// How a query's clauses combine with the policy. `concatenate` keeps both
/// (policy clauses first); `replace` drops policy clauses of any predicate
/// the query defines, like reconsulting a file.
enum class Combination : std::uint8_t { concatenate, replace };

/// Scores one trial. Each query runs against a fresh knowledge base made
/// of the policy followed by the query's own clauses and directives. A
/// policy that does not parse scores 0 with every result error(parse).
TrialRecord run_trial(const std::string& policy_code, std::span<const std::string> query_codes,
                      std::span<const GoldQuery> gold, const engine::Limits& limits = {},
                      std::string trial_id = "trial_1", std::string model_name = {},
                      Combination combination = Combination::concatenate);

/// Bad replay layout, missing files, invalid options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchmarkOptions {
  int n_trials = 1;
  int jobs = 1;
  engine::Limits limits;
  std::string model_name;
  /// When set, the summary, CSV row and per-trial records are written here.
  std::optional<std::filesystem::path> out_dir;
};

/// Gold answers from `<dir>/gold.json` when present, else the built-in
/// benchmark.
std::vector<GoldQuery> load_gold(const std::filesystem::path& dir);

/// Replays stored encodings. `dir` either holds policy.pl and
/// queries/q1.pl..q9.pl, replayed for every trial, or trial_<k>
/// subdirectories of that shape.
RunSummary replay_benchmark(const std::filesystem::path& dir, const BenchmarkOptions& opts);

/// Produces a completion for a prompt.
using Generate = std::function<llm::GenerationRecord(const std::string& prompt)>;

/// Generates a policy and nine query encodings per trial, persisting each
/// generation under `run_dir/trial_<k>` before anything is executed.
/// Generation failures are recorded on the trial, which then scores 0.
RunSummary live_benchmark(const Generate& generate, std::string_view contract, std::span<const GoldQuery> gold,
                          const std::filesystem::path& run_dir, const BenchmarkOptions& opts);

void to_json(nlohmann::json& j, const QueryResult& r);
void to_json(nlohmann::json& j, const TrialRecord& t);

/// summary.json content.
nlohmann::json summary_json(const RunSummary& s);
/// Header and one row: model, per-trial scores, mean, stderr.
std::string scores_csv(const RunSummary& s);
/// `8 7 8 | mean 7.7 ± 0.33`; the ± part is omitted for a single trial.
std::string table_row(const RunSummary& s);

/// Writes summary.json, scores.csv and trial_<k>/record.json.
void write_results(const RunSummary& s, const std::filesystem::path& dir);

}  // namespace ccx::harness
