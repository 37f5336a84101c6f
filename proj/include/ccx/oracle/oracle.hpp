#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ccx::oracle {

/// Day counts measured from the policy effective date.
namespace days {
inline constexpr std::int64_t six_months = 183;
inline constexpr std::int64_t seven_months = 213;
inline constexpr std::int64_t term = 365;
}  // namespace days

enum class Reason : std::uint8_t { sickness, accidental_injury, other };
enum class Cause : std::uint8_t { skydiving, military_service, firefighting_service, police_service, none };

std::string_view to_string(Reason r);
std::string_view to_string(Cause c);
std::optional<Reason> reason_from_string(std::string_view text);
std::optional<Cause> cause_from_string(std::string_view text);

struct ClaimScenario {
  std::int64_t time_days = 0;  // hospitalization
  std::optional<std::int64_t> visit_time_days;
  std::optional<std::int64_t> confirm_time_days;
  Reason reason = Reason::sickness;
  Cause cause = Cause::none;
  std::int64_t age_years = 0;
  bool fraud = false;

  friend bool operator==(const ClaimScenario&, const ClaimScenario&) = default;
};

/// Wellness visit by month 6, confirmed no earlier than the visit and by
/// month 7.
bool condition_1_3_satisfied(const ClaimScenario& s);

/// Not canceled for fraud, inside the one-year term, and either still in
/// the pending window or with the wellness condition met.
bool policy_in_effect(const ClaimScenario& s);

bool claim_covered(const ClaimScenario& s);

/// The single reason argument of the reference encoding:
/// the exclusion cause when there is one, else the hospitalization reason.
std::string engine_reason_argument(const ClaimScenario& s);

enum class Answer : std::uint8_t { no, yes };

std::string_view to_string(Answer a);
std::optional<Answer> answer_from_string(std::string_view text);

struct GoldQuery {
  int id = 0;
  std::string question;  // disclaimer included
  ClaimScenario scenario;
  Answer gold = Answer::no;

  friend bool operator==(const GoldQuery&, const GoldQuery&) = default;
};

/// Text placed in front of every benchmark question.
std::string_view disclaimer();

/// The nine benchmark questions with their gold answers, ids 1..9.
const std::vector<GoldQuery>& gold_benchmark();

/// Plain-text rendering of the simplified hospital cash benefit contract.
std::string_view contract_text();

inline constexpr int kGoldFormatVersion = 1;

void to_json(nlohmann::json& j, const ClaimScenario& s);
void from_json(const nlohmann::json& j, ClaimScenario& s);
void to_json(nlohmann::json& j, const GoldQuery& q);
void from_json(const nlohmann::json& j, GoldQuery& q);

/// `{"version": 1, "queries": [...]}`, pretty-printed with a trailing
/// newline.
std::string gold_to_json(const std::vector<GoldQuery>& queries);
/// Throws std::runtime_error on a malformed file or unknown version.
std::vector<GoldQuery> gold_from_json(std::string_view text);

}  // namespace ccx::oracle
