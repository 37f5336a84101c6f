#include "ccx/cli/cli.hpp"

#include <gtest/gtest.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "../llm/mock_server.hpp"
#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/parser.hpp"
#include "ccx/llm/prompts.hpp"
#include "ccx/oracle/oracle.hpp"

namespace ccx::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = fs::path(CCX_SOURCE_DIR) / "fixtures";
const std::string kPolicy = (kFixtures / "o1" / "policy.pl").string();

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() / ("ccx_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[e.path().string()] = slurp(e.path());
  }
  return files;
}

class ScopedKey {
 public:
  explicit ScopedKey(const char* value) { ::setenv("CCX_API_KEY", value, 1); }
  ~ScopedKey() { ::unsetenv("CCX_API_KEY"); }
};

std::string mock_config(const TempDir& dir, const testing::MockServer& server) {
  const auto path = dir.file("config.json");
  spit(path, nlohmann::json{{"base_url", server.base_url()},
                            {"max_retries", 0},
                            {"initial_backoff_ms", 1},
                            {"timeout_s", 10}}
                 .dump());
  return path;
}

TEST(CliQuery, QueryFileYes) {
  const auto r = cli({"query", "--policy", kPolicy, "--query", (kFixtures / "o1" / "queries" / "q7.pl").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "yes\n");
}

TEST(CliQuery, GoalNo) {
  const auto r = cli({"query", "--policy", kPolicy, "--goal", "claim_covered(400,0,0,sickness,30)"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "no\n");
}

TEST(CliQuery, Bindings) {
  const auto r = cli({"query", "--policy", kPolicy, "--goal", "excluded_reason(R, 30)."});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.substr(0, 4), "yes\n");
  EXPECT_NE(r.out.find("R = "), std::string::npos);
}

TEST(CliQuery, PolicySyntaxError) {
  TempDir dir;
  spit(dir.file("bad.pl"), "claim_covered(X :- .\n");
  const auto r = cli({"query", "--policy", dir.file("bad.pl"), "--goal", "claim_covered(1,2,3,4,5)"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_EQ(r.out, "error(parse)\n");
  EXPECT_FALSE(r.err.empty());
}

TEST(CliQuery, EngineErrorExitsOne) {
  const auto r = cli({"query", "--policy", kPolicy, "--goal", "nothing_here(1)"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_EQ(r.out, "error(existence)\n");
}

TEST(CliQuery, LimitsApplyAfterSubcommand) {
  TempDir dir;
  spit(dir.file("loop.pl"), "p :- p.\n");
  const auto r = cli({"query", "--policy", dir.file("loop.pl"), "--goal", "p", "--limits", "500,100"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_EQ(r.out, "error(resource_limit)\n");
  const auto before = cli({"--limits", "500,100", "query", "--policy", dir.file("loop.pl"), "--goal", "p"});
  EXPECT_EQ(before.out, "error(resource_limit)\n");
}

TEST(CliQuery, LimitsFromConfigFile) {
  TempDir dir;
  spit(dir.file("loop.pl"), "p :- p.\n");
  spit(dir.file("c.json"), R"({"max_steps": 300, "max_depth": 50})");
  const auto r = cli({"--config", dir.file("c.json"), "query", "--policy", dir.file("loop.pl"), "--goal", "p"});
  EXPECT_EQ(r.out, "error(resource_limit)\n");
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"query", "--policy", kPolicy}).code, kExitUsage);
  EXPECT_EQ(cli({"query", "--policy", kPolicy, "--goal", "a", "--query", "b"}).code, kExitUsage);
  EXPECT_EQ(cli({"query", "--policy", kPolicy, "--goal", "a", "--limits", "5"}).code, kExitUsage);
  EXPECT_EQ(cli({"query", "--policy", kPolicy, "--goal", "a", "--limits", "0,5"}).code, kExitUsage);
  EXPECT_EQ(cli({"graph", "--policy", kPolicy, "--format", "svg"}).code, kExitUsage);
  EXPECT_EQ(cli({"bench", "--trials", "0", "--replay", (kFixtures / "o1").string()}).code, kExitUsage);
  EXPECT_EQ(cli({"bench", "--replay", (kFixtures / "o1").string(), "--model", "m"}).code, kExitUsage);
  EXPECT_EQ(cli({"bench"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(CliUsage, MissingFileNamesPath) {
  const auto r = cli({"validate", "--policy", "/nonexistent/policy.pl"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("/nonexistent/policy.pl"), std::string::npos);
}

TEST(CliValidate, CleanAndFindings) {
  EXPECT_EQ(cli({"validate", "--policy", kPolicy}).code, kExitOk);
  EXPECT_EQ(cli({"validate", "--policy", (kFixtures / "4o" / "policy.pl").string()}).code, kExitOk);
  TempDir dir;
  spit(dir.file("p.pl"), "p :- q.\n");
  const auto r = cli({"validate", "--policy", dir.file("p.pl")});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_NE(r.out.find("q/0"), std::string::npos);
  const auto j = cli({"validate", "--policy", dir.file("p.pl"), "--json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["undefined_predicates"].size(), 1U);
  spit(dir.file("bad.pl"), "p :- .\n");
  EXPECT_EQ(cli({"validate", "--policy", dir.file("bad.pl")}).code, kExitError);
}

TEST(CliGraph, MatchesAnalysis) {
  const auto r = cli({"graph", "--policy", kPolicy, "--format", "dot"});
  EXPECT_EQ(r.code, kExitOk);
  const auto expected = analysis::emit_dot(analysis::build_rule_graph(engine::parse_program(slurp(kPolicy))));
  EXPECT_EQ(r.out, expected);
  TempDir dir;
  EXPECT_EQ(cli({"graph", "--policy", kPolicy, "--out", dir.file("g.dot")}).code, kExitOk);
  EXPECT_EQ(slurp(dir.file("g.dot")), expected);
  EXPECT_EQ(cli({"graph", "--policy", kPolicy, "--out", kPolicy}).code, kExitUsage);
}

TEST(CliBench, ReplayRows) {
  const auto o1 = cli({"bench", "--replay", (kFixtures / "o1").string(), "--trials", "1"});
  EXPECT_EQ(o1.code, kExitOk);
  EXPECT_EQ(o1.out, "9 | mean 9.0\n");
  const auto four = cli({"bench", "--replay", (kFixtures / "4o").string(), "--trials", "1"});
  EXPECT_EQ(four.out, "7 | mean 7.0\n");
}

TEST(CliBench, ReplayIsDeterministic) {
  TempDir a;
  TempDir b;
  const auto r1 = cli({"bench", "--replay", (kFixtures / "4o").string(), "--trials", "3", "--out", a.file("r")});
  const auto r2 = cli({"bench", "--replay", (kFixtures / "4o").string(), "--trials", "3", "--jobs", "3", "--out",
                       b.file("r")});
  EXPECT_EQ(r1.code, kExitOk);
  EXPECT_EQ(r1.out, r2.out);
  EXPECT_EQ(r1.out, "7 7 7 | mean 7.0 ± 0.00\n");
  EXPECT_EQ(slurp(a.path() / "r" / "summary.json"), slurp(b.path() / "r" / "summary.json"));
}

TEST(CliBench, RefusesToWriteIntoReplayDir) {
  const auto r = cli({"bench", "--replay", (kFixtures / "o1").string(), "--out", (kFixtures / "o1" / "out").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(kFixtures / "o1" / "out"));
}

TEST(CliRepl, Session) {
  const auto r = cli({"repl", "--policy", kPolicy},
                     "claim_covered(150,0,0,sickness,65).\n\ngarbage((\n:graph\nclaim_covered(400,0,0,sickness,30).\n"
                     ":quit\nclaim_covered(150,0,0,sickness,65).\n");
  EXPECT_EQ(r.code, kExitOk);
  std::istringstream lines(r.out);
  std::string first;
  std::getline(lines, first);
  EXPECT_EQ(first, "yes");
  std::string second;
  std::getline(lines, second);
  EXPECT_EQ(second.rfind("error(parse)", 0), 0U);
  EXPECT_NE(r.out.find("digraph rules {"), std::string::npos);
  EXPECT_EQ(r.out.substr(r.out.size() - 3), "no\n");
}

TEST(CliRepl, EndOfInputExits) {
  EXPECT_EQ(cli({"repl", "--policy", kPolicy}, "").code, kExitOk);
}

TEST(CliEncode, MockEndpointEndToEnd) {
  const auto policy = slurp(kPolicy);
  testing::MockServer server(
      [&](const nlohmann::json&, httplib::Response& res) { testing::MockServer::reply(res, "```prolog\n" + policy + "```"); });
  TempDir dir;
  ScopedKey key("test-key");
  const auto contract = (kFixtures / "contract" / "chubb_simplified.txt").string();
  const auto r = cli({"--config", mock_config(dir, server), "encode", "--contract", contract, "--model", "mock-model",
                      "--out", dir.file("policy.pl"), "--record", dir.file("policy.json")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto written = slurp(dir.file("policy.pl"));
  const auto report = analysis::validate_source(written);
  EXPECT_TRUE(report.parse_ok);
  EXPECT_TRUE(report.undefined_predicates.empty());
  const auto requests = server.requests();
  ASSERT_EQ(requests.size(), 1U);
  EXPECT_EQ(requests[0]["model"], "mock-model");
  EXPECT_EQ(requests[0]["messages"][0]["content"], llm::render_policy_prompt(slurp(contract)));
  EXPECT_EQ(server.auth_headers()[0], "Bearer test-key");
  EXPECT_EQ(nlohmann::json::parse(slurp(dir.file("policy.json")))["extracted_code"].get<std::string>() + "\n", written);
}

TEST(CliEncode, FindingsExitTwo) {
  testing::MockServer server([](const nlohmann::json&, httplib::Response& res) { testing::MockServer::reply(res, "p :- q."); });
  TempDir dir;
  ScopedKey key("k");
  const auto r = cli({"--config", mock_config(dir, server), "encode", "--out", dir.file("p.pl")});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_NE(r.out.find("q/0"), std::string::npos);
}

TEST(CliEncode, Errors) {
  testing::MockServer server([](const nlohmann::json&, httplib::Response& res) { res.status = 401; });
  TempDir dir;
  const auto config = mock_config(dir, server);
  {
    const auto r = cli({"--config", config, "encode"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("CCX_API_KEY"), std::string::npos);
  }
  ScopedKey key("k");
  {
    const auto r = cli({"--config", config, "encode", "--contract", "/nonexistent/contract.txt"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("/nonexistent/contract.txt"), std::string::npos);
    EXPECT_TRUE(server.requests().empty());
  }
  {
    const auto r = cli({"--config", config, "encode"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("auth"), std::string::npos);
  }
  {
    testing::MockServer garbled(
        [](const nlohmann::json&, httplib::Response& res) { testing::MockServer::reply(res, "```\np :- .\n```"); });
    const auto r = cli({"--config", mock_config(dir, garbled), "encode", "--out", dir.file("g.pl")});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("does not parse"), std::string::npos);
  }
}

// Serves the first fixture set: the policy for the encoding prompt, the
// matching stored query for each query prompt.
testing::MockServer::Handler fixture_handler() {
  return [](const nlohmann::json& body, httplib::Response& res) {
    const std::string prompt = body["messages"][0]["content"];
    if (prompt.find("- Question:") == std::string::npos) {
      testing::MockServer::reply(res, slurp(kFixtures / "o1" / "policy.pl"));
      return;
    }
    for (const auto& g : oracle::gold_benchmark()) {
      if (prompt.find(g.question) != std::string::npos) {
        testing::MockServer::reply(res, slurp(kFixtures / "o1" / "queries" / ("q" + std::to_string(g.id) + ".pl")));
        return;
      }
    }
    res.status = 400;
  };
}

TEST(CliBench, LiveAgainstMockEndpoint) {
  testing::MockServer server(fixture_handler());
  TempDir dir;
  ScopedKey key("k");
  const auto r = cli({"--config", mock_config(dir, server), "bench", "--model", "mock", "--trials", "2", "--out",
                      dir.file("run")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "9 9 | mean 9.0 ± 0.00\n");
  EXPECT_EQ(server.requests().size(), 20U);
  for (const char* trial : {"trial_1", "trial_2"}) {
    int generations = 0;
    for (const auto& e : fs::directory_iterator(dir.path() / "run" / trial / "generations")) {
      generations += e.path().extension() == ".json" ? 1 : 0;
    }
    EXPECT_EQ(generations, 10);
    EXPECT_TRUE(fs::exists(dir.path() / "run" / trial / "record.json"));
  }
}

TEST(CliInvariant, FixturesUntouched) {
  const auto before = snapshot(kFixtures);
  TempDir dir;
  cli({"query", "--policy", kPolicy, "--goal", "claim_covered(1,0,0,sickness,30)"});
  cli({"validate", "--policy", kPolicy});
  cli({"graph", "--policy", kPolicy, "--out", dir.file("g.dot")});
  cli({"bench", "--replay", (kFixtures / "o1").string(), "--trials", "2", "--out", dir.file("r")});
  cli({"repl", "--policy", kPolicy}, "assert(extra_fact).\nretract(claim_covered(_,_,_,_,_)).\n:quit\n");
  EXPECT_EQ(snapshot(kFixtures), before);
}

}  // namespace
}  // namespace ccx::cli
