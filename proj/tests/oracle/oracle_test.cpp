#include "ccx/oracle/oracle.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

namespace ccx::oracle {
namespace {

ClaimScenario scenario(std::int64_t time, std::optional<std::int64_t> visit, std::optional<std::int64_t> confirm,
                       Reason reason = Reason::sickness, Cause cause = Cause::none, std::int64_t age = 40) {
  return {time, visit, confirm, reason, cause, age, false};
}

TEST(PolicyInEffect, PendingWindow) { EXPECT_TRUE(policy_in_effect(scenario(100, std::nullopt, std::nullopt))); }

TEST(PolicyInEffect, LateConfirmation) { EXPECT_FALSE(policy_in_effect(scenario(240, 180, 244))); }

TEST(PolicyInEffect, LastDayOfTermWithBoundaryConfirmation) { EXPECT_TRUE(policy_in_effect(scenario(364, 183, 213))); }

TEST(PolicyInEffect, TermEnds) {
  EXPECT_FALSE(policy_in_effect(scenario(365, 30, 60)));
  EXPECT_FALSE(policy_in_effect(scenario(-1, 30, 60)));
}

TEST(PolicyInEffect, FraudCancels) {
  auto s = scenario(10, 30, 60);
  s.fraud = true;
  EXPECT_FALSE(policy_in_effect(s));
}

TEST(PolicyInEffect, MissingTimesAfterPendingWindow) {
  EXPECT_FALSE(policy_in_effect(scenario(213, std::nullopt, std::nullopt)));
  EXPECT_TRUE(policy_in_effect(scenario(212, std::nullopt, std::nullopt)));
}

TEST(Condition13, Boundaries) {
  EXPECT_TRUE(condition_1_3_satisfied(scenario(0, 183, 213)));
  EXPECT_FALSE(condition_1_3_satisfied(scenario(0, 184, 190)));
  EXPECT_TRUE(condition_1_3_satisfied(scenario(0, 30, 60)));
  EXPECT_FALSE(condition_1_3_satisfied(scenario(0, 60, 30)));
  EXPECT_FALSE(condition_1_3_satisfied(scenario(0, 30, 214)));
  EXPECT_FALSE(condition_1_3_satisfied(scenario(0, -1, 30)));
  EXPECT_FALSE(condition_1_3_satisfied(scenario(0, 30, std::nullopt)));
}

TEST(ClaimCovered, Examples) {
  EXPECT_TRUE(claim_covered(scenario(150, std::nullopt, std::nullopt, Reason::sickness, Cause::none, 65)));
  EXPECT_FALSE(claim_covered(scenario(200, 180, 198, Reason::accidental_injury, Cause::skydiving, 79)));
  EXPECT_FALSE(claim_covered(scenario(100, std::nullopt, std::nullopt, Reason::other, Cause::none, 30)));
  EXPECT_FALSE(claim_covered(scenario(100, std::nullopt, std::nullopt, Reason::sickness, Cause::none, 80)));
}

TEST(ReasonArgument, CauseWinsOverReason) {
  EXPECT_EQ(engine_reason_argument(scenario(0, 0, 0, Reason::accidental_injury, Cause::skydiving)), "skydiving");
  EXPECT_EQ(engine_reason_argument(scenario(0, 0, 0, Reason::other, Cause::none)), "other");
}

TEST(Gold, NineQueriesWithPublishedAnswers) {
  const auto& gold = gold_benchmark();
  ASSERT_EQ(gold.size(), 9U);
  const Answer expected[] = {Answer::no, Answer::yes, Answer::yes, Answer::no, Answer::no,
                             Answer::no, Answer::yes, Answer::no, Answer::yes};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    EXPECT_EQ(gold[i].id, static_cast<int>(i) + 1);
    EXPECT_EQ(gold[i].gold, expected[i]) << gold[i].id;
    EXPECT_EQ(gold[i].question.rfind(disclaimer(), 0), 0U);
  }
  EXPECT_NE(gold[0].question.find("follows), will the claim"), std::string::npos);
}

TEST(Gold, OracleScoresNineOfNine) {
  int correct = 0;
  for (const auto& q : gold_benchmark()) {
    const auto answer = claim_covered(q.scenario) ? Answer::yes : Answer::no;
    if (answer == q.gold) ++correct;
  }
  EXPECT_EQ(correct, 9);
}

TEST(Gold, JsonRoundTrip) {
  const auto text = gold_to_json(gold_benchmark());
  EXPECT_EQ(gold_from_json(text), gold_benchmark());
  EXPECT_THROW(gold_from_json("{\"version\": 2, \"queries\": []}"), std::runtime_error);
  EXPECT_THROW(gold_from_json("not json"), std::runtime_error);
}

TEST(Gold, FixtureFilesMatchBuiltIn) {
  for (const char* set : {"o1", "4o"}) {
    std::ifstream in(std::string(CCX_SOURCE_DIR) + "/fixtures/" + set + "/gold.json");
    ASSERT_TRUE(in) << set;
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), gold_to_json(gold_benchmark())) << set;
  }
}

TEST(Contract, TextIsEmbedded) {
  const auto text = contract_text();
  EXPECT_EQ(text.rfind("Between:", 0), 0U);
  EXPECT_NE(text.find("no later than the 6th month anniversary"), std::string_view::npos);
  EXPECT_NE(text.find("equal to or greater than 80 years of age"), std::string_view::npos);
  EXPECT_EQ(text.back(), '\n');
}

// Randomized scenarios for the invariants below.
class ScenarioGen {
 public:
  explicit ScenarioGen(unsigned seed) : rng_(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  std::optional<std::int64_t> maybe_day() {
    if (range(0, 4) == 0) return std::nullopt;
    return range(0, 400);
  }
  ClaimScenario next() {
    ClaimScenario s;
    s.time_days = range(0, 400);
    s.visit_time_days = maybe_day();
    s.confirm_time_days = maybe_day();
    s.reason = static_cast<Reason>(range(0, 2));
    s.cause = static_cast<Cause>(range(0, 4));
    s.age_years = range(18, 100);
    s.fraud = range(0, 9) == 0;
    return s;
  }

 private:
  std::mt19937 rng_;
};

TEST(OracleProperty, AgeExclusion) {
  ScenarioGen gen(1);
  for (int i = 0; i < 1000; ++i) {
    auto s = gen.next();
    s.age_years = gen.range(80, 120);
    EXPECT_FALSE(claim_covered(s));
  }
}

TEST(OracleProperty, PendingWindowIgnoresWellnessTimes) {
  ScenarioGen gen(2);
  for (int i = 0; i < 1000; ++i) {
    auto s = gen.next();
    s.time_days = gen.range(0, 212);
    s.fraud = false;
    auto other = s;
    other.visit_time_days = gen.maybe_day();
    other.confirm_time_days = gen.maybe_day();
    EXPECT_EQ(claim_covered(s), claim_covered(other));
  }
}

TEST(OracleProperty, MeetingTheDeadlineRestoresEffect) {
  ScenarioGen gen(3);
  int exercised = 0;
  for (int i = 0; i < 2000; ++i) {
    auto s = gen.next();
    s.fraud = false;
    s.time_days = gen.range(213, 364);
    s.visit_time_days = gen.range(0, 183);
    s.confirm_time_days = gen.range(214, 400);
    ASSERT_FALSE(policy_in_effect(s));
    ++exercised;
    s.confirm_time_days = gen.range(*s.visit_time_days, 213);
    EXPECT_TRUE(policy_in_effect(s));
  }
  EXPECT_GE(exercised, 100);
}

}  // namespace
}  // namespace ccx::oracle
