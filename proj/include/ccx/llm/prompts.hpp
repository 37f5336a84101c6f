#pragma once

#include <string>
#include <string_view>

namespace ccx::llm {

/// Policy-encoding prompt with the contract substituted. Throws
/// std::invalid_argument when the contract is empty.
std::string render_policy_prompt(std::string_view contract_text);

/// Query-encoding prompt. Throws std::invalid_argument when any input is
/// empty.
std::string render_query_prompt(std::string_view question, std::string_view contract_text,
                                std::string_view policy_encoding);

/// Contents of fenced code blocks joined by newlines, ignoring language
/// tags, or the trimmed response when it has no fences. An empty result
/// means nothing could be extracted.
std::string extract_code(std::string_view raw_response);

}  // namespace ccx::llm
