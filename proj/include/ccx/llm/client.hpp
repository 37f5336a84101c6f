#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ccx::llm {

struct Sampling {
  double top_p = 1;
  double temperature = 1;
  int n = 1;
  double presence_penalty = 0;
  double frequency_penalty = 0;
};

struct ModelConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "o1-preview";
  std::string api_key;
  Sampling sampling;
  double timeout_s = 600;
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  int max_in_flight = 4;
};

/// Reads base_url, model_name, sampling, timeout_s, max_retries,
/// initial_backoff_ms and max_in_flight from a JSON object over the
/// defaults. Throws std::runtime_error on malformed input.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

/// Reads the API key from CCX_API_KEY when the config has none.
void apply_environment(ModelConfig& cfg);

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;
};

struct GenerationRecord {
  std::string prompt;
  std::string raw_response;
  std::string extracted_code;
  std::string model_name;
  std::string timestamp;  // UTC, ISO 8601
  std::optional<TokenUsage> token_usage;
  int retries = 0;
  std::vector<std::string> dropped_fields;
};

void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

class LlmError : public std::runtime_error {
 public:
  enum class Kind : std::uint8_t { auth, timeout, provider, transport, config };

  LlmError(Kind kind, const std::string& message, int status = 0)
      : std::runtime_error(message), kind_(kind), status_(status) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  /// HTTP status, or 0 when no response was received.
  [[nodiscard]] int status() const { return status_; }

 private:
  Kind kind_;
  int status_;
};

std::string_view to_string(LlmError::Kind kind);

/// Chat-completion client. Thread-safe; at most `max_in_flight` requests
/// are outstanding at once.
class Client {
 public:
  explicit Client(ModelConfig cfg);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// One completion for a single user message carrying `prompt`. Retries
  /// rate limits, server errors and transport failures with exponential
  /// backoff.
  GenerationRecord complete(const std::string& prompt);

  [[nodiscard]] const ModelConfig& config() const { return cfg_; }
  /// Sampling fields the provider rejected so far.
  [[nodiscard]] std::set<std::string> dropped_fields() const;

 private:
  nlohmann::json request_body(const std::string& prompt) const;

  ModelConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::counting_semaphore<> slots_;
  mutable std::mutex mutex_;
  std::set<std::string> dropped_;
};

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

}  // namespace ccx::llm
