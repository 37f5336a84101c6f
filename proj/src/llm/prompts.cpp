#include "ccx/llm/prompts.hpp"

#include <stdexcept>

namespace ccx::llm {

namespace {

constexpr std::string_view kPolicyTemplate =
    R"(- Given the insurance contract below, translate the document into valid Prolog rules so that I can run a Prolog query on the code regarding whether or not some claim is covered under the policy and receive the correct answer to the question.

- Please fully define all predicates and DO NOT define any facts, only rules that can be used to answer queries on this insurance contract.

- Assume that all dates/times in any query to this code (apart from the claimant's age) will be given RELATIVE to the effective date of the policy (i.e. there will never be a need to calculate the time elapsed between two dates). Take dates RELATIVE TO the effective date into account when writing this encoding.

- Assume that the agreement has been signed and the premium has been paid (on time). There is no need to encode rules or facts for these conditions.

- Return only Prolog code in your reply. No explanation is necessary.

- Ensure that:
1. The legal text is appropriately translated into correct Prolog rules.
2. The output does not redefine, misuse, or conflict with any built-in Prolog predicates.
3. If dynamic predicates are necessary, they are declared and managed correctly.
4. All predicates used in the generated Prolog code, including those referenced in the query, are fully defined and error-free to prevent issues like "procedure does not exist."
5. Logical relationships, conditions, and dependencies in the text are faithfully represented in the Prolog rules to ensure accurate query results.

- Insurance contract:
{text_content})";

constexpr std::string_view kQueryTemplate =
    R"(- I have given below:
1. A question about whether or not the policy defined in a given insurance contract applies in a particular situation
2. The text of the insurance contract
3. A Prolog encoding of the insurance contract
- Encode the question into a Prolog query such that it can be run on the Prolog encoding of the insurance contract, returning the correct answer to the question.

- Assume that the agreement has been signed and the premium has been paid (on time). There is no need to encode rules or facts for these conditions.

- Return only Prolog code in your reply. No explanation is necessary.

- Ensure that:
1. The output does not redefine, misuse, or conflict with any built-in Prolog predicates.
2. If dynamic predicates are necessary, they are declared and managed correctly.
3. All predicates used in the generated Prolog code, including those referenced in the query, are fully defined and error-free to prevent issues like "procedure does not exist."
4. Logical relationships, conditions, and dependencies in the text are faithfully represented in the Prolog rules to ensure accurate query results.
5. No absolute dates/times (apart from the claimant's age) are encoded in your query. Only include dates/times RELATIVE to the effective date of the policy (again, except for age).
6. Set any facts/rules/parameters in the code such that ALL conditions (for the policy to apply) which are UNRELATED to the above query are satisfied.
7. Set any facts/rules/parameters in the code such that NO exclusions (which would prevent the policy from applying) which are UNRELATED to the above query are satisfied.

- Question:
{query}

- Insurance contract: 
{text_content}

- Insurance contract Prolog encoding:
{policy_encoding})";

// Single pass, so placeholder text inside a substituted value is left alone.
std::string fill(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [key, value] : values) {
        if (tmpl.substr(i + 1, key.size()) == key && i + 1 + key.size() < tmpl.size() && tmpl[i + 1 + key.size()] == '}') {
          out += value;
          i += key.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

void require(std::string_view value, const char* what) {
  if (value.empty()) throw std::invalid_argument(std::string(what) + " must not be empty");
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string render_policy_prompt(std::string_view contract_text) {
  require(contract_text, "contract text");
  return fill(kPolicyTemplate, {{"text_content", contract_text}});
}

std::string render_query_prompt(std::string_view question, std::string_view contract_text,
                                std::string_view policy_encoding) {
  require(question, "question");
  require(contract_text, "contract text");
  require(policy_encoding, "policy encoding");
  return fill(kQueryTemplate, {{"query", question}, {"text_content", contract_text}, {"policy_encoding", policy_encoding}});
}

std::string extract_code(std::string_view raw) {
  std::string out;
  bool found = false;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find("```", pos);
    if (open == std::string_view::npos) break;
    // Fences must start a line.
    if (open > 0 && raw[open - 1] != '\n') {
      pos = open + 3;
      continue;
    }
    const auto body_start = raw.find('\n', open);
    if (body_start == std::string_view::npos) break;
    auto close = raw.find("\n```", body_start);
    std::string_view body;
    if (close == std::string_view::npos) {
      body = raw.substr(body_start + 1);
    } else if (close > body_start) {
      body = raw.substr(body_start + 1, close - body_start - 1);
    }
    const auto trimmed = trim(body);
    if (!trimmed.empty()) {
      if (!out.empty()) out += '\n';
      out += trimmed;
    }
    found = true;
    if (close == std::string_view::npos) break;
    const auto after = raw.find('\n', close + 4);
    if (after == std::string_view::npos) break;
    pos = after + 1;
  }
  if (!found) return std::string(trim(raw));
  return out;
}

}  // namespace ccx::llm
