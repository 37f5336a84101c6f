#include "ccx/llm/client.hpp"

#include <httplib.h>

#include <cstdlib>
#include <ctime>
#include <regex>
#include <thread>

#include "ccx/llm/prompts.hpp"

namespace ccx::llm {

namespace {

constexpr const char* kSamplingFields[] = {"top_p", "temperature", "n", "presence_penalty", "frequency_penalty"};

// Name of the sampling field a 400 response complains about, if any.
std::optional<std::string> rejected_field(const std::string& body) {
  std::string param;
  std::string message = body;
  try {
    const auto j = nlohmann::json::parse(body);
    if (j.contains("error") && j["error"].is_object()) {
      const auto& e = j["error"];
      if (e.contains("param") && e["param"].is_string()) param = e["param"].get<std::string>();
      if (e.contains("message") && e["message"].is_string()) message = e["message"].get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  for (const char* field : kSamplingFields) {
    if (param == field) return std::string(field);
  }
  for (const char* field : kSamplingFields) {
    const std::regex quoted("['\"`]" + std::string(field) + "['\"`]");
    if (std::regex_search(message, quoted)) return std::string(field);
  }
  return std::nullopt;
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

}  // namespace

std::string_view to_string(LlmError::Kind kind) {
  switch (kind) {
    case LlmError::Kind::auth: return "auth";
    case LlmError::Kind::timeout: return "timeout";
    case LlmError::Kind::provider: return "provider";
    case LlmError::Kind::transport: return "transport";
    case LlmError::Kind::config: return "config";
  }
  return "unknown";
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig cfg) {
  try {
    if (!j.is_object()) throw std::runtime_error("model config must be a JSON object");
    cfg.base_url = j.value("base_url", cfg.base_url);
    cfg.model_name = j.value("model_name", cfg.model_name);
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
    cfg.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", cfg.initial_backoff.count()));
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      cfg.sampling.top_p = s.value("top_p", cfg.sampling.top_p);
      cfg.sampling.temperature = s.value("temperature", cfg.sampling.temperature);
      cfg.sampling.n = s.value("n", cfg.sampling.n);
      cfg.sampling.presence_penalty = s.value("presence_penalty", cfg.sampling.presence_penalty);
      cfg.sampling.frequency_penalty = s.value("frequency_penalty", cfg.sampling.frequency_penalty);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model config: ") + e.what());
  }
  if (cfg.max_in_flight < 1) throw std::runtime_error("max_in_flight must be at least 1");
  if (cfg.max_retries < 0) throw std::runtime_error("max_retries must not be negative");
  return cfg;
}

void apply_environment(ModelConfig& cfg) {
  if (!cfg.api_key.empty()) return;
  if (const char* key = std::getenv("CCX_API_KEY")) cfg.api_key = key;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void to_json(nlohmann::json& j, const GenerationRecord& r) {
  j = nlohmann::json{{"prompt", r.prompt},
                     {"raw_response", r.raw_response},
                     {"extracted_code", r.extracted_code},
                     {"model_name", r.model_name},
                     {"timestamp", r.timestamp},
                     {"retries", r.retries},
                     {"dropped_fields", r.dropped_fields}};
  if (r.token_usage) {
    j["token_usage"] = {{"prompt_tokens", r.token_usage->prompt_tokens},
                        {"completion_tokens", r.token_usage->completion_tokens},
                        {"total_tokens", r.token_usage->total_tokens}};
  } else {
    j["token_usage"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, GenerationRecord& r) {
  r.prompt = j.value("prompt", "");
  r.raw_response = j.at("raw_response").get<std::string>();
  r.extracted_code = j.value("extracted_code", extract_code(r.raw_response));
  r.model_name = j.value("model_name", "");
  r.timestamp = j.value("timestamp", "");
  r.retries = j.value("retries", 0);
  r.dropped_fields = j.value("dropped_fields", std::vector<std::string>{});
  if (j.contains("token_usage") && j["token_usage"].is_object()) {
    const auto& u = j["token_usage"];
    r.token_usage = TokenUsage{u.value("prompt_tokens", std::int64_t{0}), u.value("completion_tokens", std::int64_t{0}),
                               u.value("total_tokens", std::int64_t{0})};
  } else {
    r.token_usage.reset();
  }
}

Client::Client(ModelConfig cfg) : cfg_(std::move(cfg)), slots_(std::max(1, cfg_.max_in_flight)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.base_url, m, url)) {
    throw LlmError(LlmError::Kind::config, "invalid base URL: " + cfg_.base_url);
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

Client::~Client() = default;

std::set<std::string> Client::dropped_fields() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

nlohmann::json Client::request_body(const std::string& prompt) const {
  nlohmann::json body{{"model", cfg_.model_name},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  const auto& s = cfg_.sampling;
  const std::pair<const char*, nlohmann::json> fields[] = {{"top_p", s.top_p},
                                                           {"temperature", s.temperature},
                                                           {"n", s.n},
                                                           {"presence_penalty", s.presence_penalty},
                                                           {"frequency_penalty", s.frequency_penalty}};
  std::lock_guard lock(mutex_);
  for (const auto& [name, value] : fields) {
    if (!dropped_.count(name)) body[name] = value;
  }
  return body;
}

GenerationRecord Client::complete(const std::string& prompt) {
  SlotGuard slot(slots_);
  httplib::Client http(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
  http.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  http.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  http.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  GenerationRecord record;
  record.prompt = prompt;
  record.model_name = cfg_.model_name;
  auto backoff = cfg_.initial_backoff;
  std::string last_error;
  LlmError::Kind last_kind = LlmError::Kind::transport;
  int last_status = 0;

  for (int attempt = 0;; ++attempt) {
    const auto body = request_body(prompt).dump();
    auto res = http.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    bool transient = false;
    if (!res) {
      const auto err = res.error();
      last_kind = err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout
                      ? LlmError::Kind::timeout
                      : LlmError::Kind::transport;
      last_status = 0;
      last_error = "request failed: " + httplib::to_string(err);
      transient = true;
    } else if (res->status == 200) {
      try {
        const auto j = nlohmann::json::parse(res->body);
        record.raw_response = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage") && j["usage"].is_object()) {
          const auto& u = j["usage"];
          record.token_usage = TokenUsage{u.value("prompt_tokens", std::int64_t{0}),
                                          u.value("completion_tokens", std::int64_t{0}),
                                          u.value("total_tokens", std::int64_t{0})};
        }
      } catch (const nlohmann::json::exception& e) {
        throw LlmError(LlmError::Kind::provider, std::string("unexpected response shape: ") + e.what(), 200);
      }
      record.extracted_code = extract_code(record.raw_response);
      {
        std::lock_guard lock(mutex_);
        record.dropped_fields.assign(dropped_.begin(), dropped_.end());
      }
      record.timestamp = utc_timestamp();
      record.retries = attempt;
      return record;
    } else if (res->status == 401 || res->status == 403) {
      throw LlmError(LlmError::Kind::auth, "authentication failed (HTTP " + std::to_string(res->status) + ")",
                     res->status);
    } else if (res->status == 400) {
      if (auto field = rejected_field(res->body)) {
        std::lock_guard lock(mutex_);
        if (!dropped_.count(*field)) {
          dropped_.insert(*field);
          // Resending without the field is not a retry.
          --attempt;
          continue;
        }
      }
      throw LlmError(LlmError::Kind::provider, "HTTP 400: " + res->body, 400);
    } else if (res->status == 429 || res->status >= 500) {
      last_kind = LlmError::Kind::provider;
      last_status = res->status;
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      transient = true;
    } else {
      throw LlmError(LlmError::Kind::provider, "HTTP " + std::to_string(res->status) + ": " + res->body, res->status);
    }

    if (transient && attempt >= cfg_.max_retries) {
      throw LlmError(last_kind, last_error + " (after " + std::to_string(attempt) + " retries)", last_status);
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace ccx::llm
