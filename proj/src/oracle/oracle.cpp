#include "ccx/oracle/oracle.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace ccx::oracle {

namespace {

constexpr std::array<std::pair<Reason, std::string_view>, 3> kReasons{{
    {Reason::sickness, "sickness"},
    {Reason::accidental_injury, "accidental_injury"},
    {Reason::other, "other"},
}};

constexpr std::array<std::pair<Cause, std::string_view>, 5> kCauses{{
    {Cause::skydiving, "skydiving"},
    {Cause::military_service, "military_service"},
    {Cause::firefighting_service, "firefighting_service"},
    {Cause::police_service, "police_service"},
    {Cause::none, "none"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text) {
  for (const auto& [e, name] : table) {
    if (name == text) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Reason r) { return name_of(kReasons, r); }
std::string_view to_string(Cause c) { return name_of(kCauses, c); }
std::optional<Reason> reason_from_string(std::string_view text) { return value_of(kReasons, text); }
std::optional<Cause> cause_from_string(std::string_view text) { return value_of(kCauses, text); }

std::string_view to_string(Answer a) { return a == Answer::yes ? "yes" : "no"; }

std::optional<Answer> answer_from_string(std::string_view text) {
  if (text == "yes") return Answer::yes;
  if (text == "no") return Answer::no;
  return std::nullopt;
}

bool condition_1_3_satisfied(const ClaimScenario& s) {
  if (!s.visit_time_days || !s.confirm_time_days) return false;
  const auto visit = *s.visit_time_days;
  const auto confirm = *s.confirm_time_days;
  return visit >= 0 && visit <= days::six_months && visit <= confirm && confirm <= days::seven_months;
}

bool policy_in_effect(const ClaimScenario& s) {
  if (s.fraud) return false;
  if (s.time_days < 0 || s.time_days >= days::term) return false;
  return s.time_days < days::seven_months || condition_1_3_satisfied(s);
}

bool claim_covered(const ClaimScenario& s) {
  const bool covered_reason = s.reason == Reason::sickness || s.reason == Reason::accidental_injury;
  return policy_in_effect(s) && covered_reason && s.cause == Cause::none && s.age_years < 80;
}

std::string engine_reason_argument(const ClaimScenario& s) {
  return std::string(s.cause != Cause::none ? to_string(s.cause) : to_string(s.reason));
}

std::string_view disclaimer() {
  return "Assuming all other conditions are met and no other exclusions apply (where by 'other,' I mean anything "
         "not referenced in the query that follows),";
}

const std::vector<GoldQuery>& gold_benchmark() {
  static const std::vector<GoldQuery> queries = [] {
    struct Row {
      const char* text;
      ClaimScenario scenario;
      Answer gold;
    };
    const Row rows[] = {
        {"will the claim be covered under the policy if I was hospitalized by burns suffered while doing my duty as "
         "a firefighter?",
         {100, 150, 160, Reason::accidental_injury, Cause::firefighting_service, 40, false},
         Answer::no},
        {"will the claim be covered under the policy if I am 78 years old at the time of hospitalization?",
         {200, 150, 160, Reason::sickness, Cause::none, 78, false},
         Answer::yes},
        {"will the claim be covered under the policy if I was hospitalized for pneumonia 5 months after the policy's "
         "effective date, and my age at the time of hospitalization is 65?",
         {150, std::nullopt, std::nullopt, Reason::sickness, Cause::none, 65, false},
         Answer::yes},
        {"will the claim be covered under the policy if I was hospitalized due to a fall while traveling abroad and I "
         "had given confirmation of my wellness visit 8 months after the policy's effective date?",
         {240, 180, 244, Reason::accidental_injury, Cause::none, 30, false},
         Answer::no},
        {"will the claim be covered under the policy if I was hospitalized for punching my own face to show off for "
         "my friends and I did not commit fraud or misrepresentation?",
         {100, std::nullopt, std::nullopt, Reason::other, Cause::none, 30, false},
         Answer::no},
        {"will the claim be covered under the policy if I was hospitalized due to an injury sustained while "
         "skydiving, my age at the time of hospitalization was 79, and proof of my wellness visit was provided 6.5 "
         "months after the policy's effective date?",
         {200, 180, 198, Reason::accidental_injury, Cause::skydiving, 79, false},
         Answer::no},
        {"will the claim be covered under the policy if I was hospitalized for a heart attack, proof of the wellness "
         "visit was submitted 2 months after the policy's effective date, and my age at the time of hospitalization "
         "was 75?",
         {100, 30, 60, Reason::sickness, Cause::none, 75, false},
         Answer::yes},
        {"will the claim be covered under the policy if I was hospitalized after being injured in a military "
         "training exercise, the hospitalization occurred within the policy term, and I did not commit fraud?",
         {100, std::nullopt, std::nullopt, Reason::accidental_injury, Cause::military_service, 40, false},
         Answer::no},
        {"will the claim be covered under the policy if I was hospitalized due to my son biting me in the ankle, "
         "proof of my wellness visit was provided 6 months after the effective date, and I was serving as a police "
         "officer at the time of hospitalization?",
         {200, 180, 183, Reason::accidental_injury, Cause::none, 40, false},
         Answer::yes},
    };
    std::vector<GoldQuery> out;
    int id = 1;
    for (const auto& row : rows) {
      out.push_back({id++, std::string(disclaimer()) + " " + row.text, row.scenario, row.gold});
    }
    return out;
  }();
  return queries;
}

void to_json(nlohmann::json& j, const ClaimScenario& s) {
  auto optional = [](const std::optional<std::int64_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"time_days", s.time_days},
                     {"visit_time_days", optional(s.visit_time_days)},
                     {"confirm_time_days", optional(s.confirm_time_days)},
                     {"reason", to_string(s.reason)},
                     {"cause", to_string(s.cause)},
                     {"age_years", s.age_years},
                     {"fraud", s.fraud}};
}

void from_json(const nlohmann::json& j, ClaimScenario& s) {
  auto optional = [&](const char* key) -> std::optional<std::int64_t> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::int64_t>();
  };
  s.time_days = j.at("time_days").get<std::int64_t>();
  s.visit_time_days = optional("visit_time_days");
  s.confirm_time_days = optional("confirm_time_days");
  const auto reason = reason_from_string(j.at("reason").get<std::string>());
  const auto cause = cause_from_string(j.at("cause").get<std::string>());
  if (!reason) throw std::runtime_error("unknown reason: " + j.at("reason").get<std::string>());
  if (!cause) throw std::runtime_error("unknown cause: " + j.at("cause").get<std::string>());
  s.reason = *reason;
  s.cause = *cause;
  s.age_years = j.at("age_years").get<std::int64_t>();
  s.fraud = j.value("fraud", false);
}

void to_json(nlohmann::json& j, const GoldQuery& q) {
  j = nlohmann::json{{"id", q.id}, {"question", q.question}, {"scenario", q.scenario}, {"gold", to_string(q.gold)}};
}

void from_json(const nlohmann::json& j, GoldQuery& q) {
  q.id = j.at("id").get<int>();
  q.question = j.at("question").get<std::string>();
  q.scenario = j.at("scenario").get<ClaimScenario>();
  const auto gold = answer_from_string(j.at("gold").get<std::string>());
  if (!gold) throw std::runtime_error("gold must be \"yes\" or \"no\"");
  q.gold = *gold;
}

std::string gold_to_json(const std::vector<GoldQuery>& queries) {
  const nlohmann::json j{{"version", kGoldFormatVersion}, {"queries", queries}};
  return j.dump(2) + "\n";
}

std::vector<GoldQuery> gold_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int version = j.at("version").get<int>();
    if (version != kGoldFormatVersion) throw std::runtime_error("unsupported gold format version " + std::to_string(version));
    return j.at("queries").get<std::vector<GoldQuery>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed gold file: ") + e.what());
  }
}

}  // namespace ccx::oracle
