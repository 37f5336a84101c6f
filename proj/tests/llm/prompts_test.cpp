#include "ccx/llm/prompts.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ccx/oracle/oracle.hpp"

namespace ccx::llm {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(PolicyPrompt, SubstitutesContract) {
  const auto p = render_policy_prompt("X");
  EXPECT_NE(p.find("- Insurance contract:\nX"), std::string::npos);
  EXPECT_EQ(p.substr(p.size() - 2), "\nX");
}

TEST(PolicyPrompt, ConditionFourWarnsAboutMissingProcedures) {
  const auto p = render_policy_prompt(oracle::contract_text());
  const auto item = p.find("\n4. ");
  ASSERT_NE(item, std::string::npos);
  const auto end = p.find('\n', item + 1);
  EXPECT_NE(p.substr(item, end - item).find("procedure does not exist"), std::string::npos);
}

TEST(PolicyPrompt, EmptyContractRejected) { EXPECT_THROW(render_policy_prompt(""), std::invalid_argument); }

TEST(QueryPrompt, EndsWithEncoding) {
  const auto p = render_query_prompt("Q", "C", "P");
  const std::string tail = "- Insurance contract Prolog encoding:\nP";
  ASSERT_GE(p.size(), tail.size());
  EXPECT_EQ(p.substr(p.size() - tail.size()), tail);
  EXPECT_NE(p.find("- Question:\nQ\n"), std::string::npos);
  EXPECT_NE(p.find("- Insurance contract: \nC\n"), std::string::npos);
}

TEST(QueryPrompt, CarriesDisclaimer) {
  const auto& q1 = oracle::gold_benchmark().front();
  EXPECT_NE(render_query_prompt(q1.question, "C", "P").find("Assuming all other conditions are met"), std::string::npos);
}

TEST(QueryPrompt, MissingInputRejected) {
  EXPECT_THROW(render_query_prompt("Q", "C", ""), std::invalid_argument);
  EXPECT_THROW(render_query_prompt("", "C", "P"), std::invalid_argument);
}

TEST(Prompts, PlaceholdersInsideValuesAreLeftAlone) {
  const auto p = render_query_prompt("{policy_encoding}", "C", "P");
  EXPECT_NE(p.find("- Question:\n{policy_encoding}\n"), std::string::npos);
}

TEST(Prompts, MatchGoldenFiles) {
  const std::string dir = std::string(CCX_SOURCE_DIR) + "/tests/golden/";
  EXPECT_EQ(render_policy_prompt(oracle::contract_text()), slurp(dir + "policy_prompt.txt"));
  const auto policy = slurp(std::string(CCX_SOURCE_DIR) + "/fixtures/o1/policy.pl");
  EXPECT_EQ(render_query_prompt(oracle::gold_benchmark().front().question, oracle::contract_text(), policy),
            slurp(dir + "query_prompt_q1.txt"));
}

TEST(Prompts, Pure) {
  EXPECT_EQ(render_policy_prompt("abc"), render_policy_prompt("abc"));
  EXPECT_EQ(render_query_prompt("a", "b", "c"), render_query_prompt("a", "b", "c"));
}

TEST(ExtractCode, SingleFence) { EXPECT_EQ(extract_code("```prolog\np.\n```"), "p."); }

TEST(ExtractCode, TwoFencesJoined) {
  EXPECT_EQ(extract_code("Here:\n```prolog\na.\n```\nand\n```\nb :- a.\n```\n"), "a.\nb :- a.");
}

TEST(ExtractCode, Unfenced) { EXPECT_EQ(extract_code("  p. q :- p.\n"), "p. q :- p."); }

TEST(ExtractCode, UnterminatedFence) { EXPECT_EQ(extract_code("```prolog\np.\n"), "p."); }

TEST(ExtractCode, EmptyFenceGivesEmpty) {
  EXPECT_EQ(extract_code("```\n```"), "");
  EXPECT_EQ(extract_code("   "), "");
}

TEST(ExtractCode, InlineBackticksAreNotFences) { EXPECT_EQ(extract_code("use `p.` here"), "use `p.` here"); }

std::string random_code(std::mt19937& rng) {
  static const char* pieces[] = {"p.", "q :- p.", "\n", "  ", "% note", "x(1, 2).", "\t", "a :- \\+ b."};
  std::string out;
  for (int i = std::uniform_int_distribution<int>(0, 8)(rng); i > 0; --i) {
    out += pieces[std::uniform_int_distribution<int>(0, 7)(rng)];
  }
  return out;
}

TEST(ExtractCodeProperty, IdempotentOnUnfencedText) {
  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    const auto x = random_code(rng);
    EXPECT_EQ(extract_code(extract_code(x)), extract_code(x));
  }
}

TEST(ExtractCodeProperty, RefencingIsStable) {
  std::mt19937 rng(18);
  for (int i = 0; i < 300; ++i) {
    std::string response = random_code(rng);
    for (int k = std::uniform_int_distribution<int>(1, 3)(rng); k > 0; --k) {
      response += "\n```prolog\n" + random_code(rng) + "\n```\n" + random_code(rng);
    }
    const auto code = extract_code(response);
    EXPECT_EQ(extract_code("```prolog\n" + code + "\n```"), code) << response;
    EXPECT_NE(response.find(code.substr(0, code.find('\n'))), std::string::npos);
  }
}

}  // namespace
}  // namespace ccx::llm
