#pragma once

#include <httplib.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace ccx::testing {

/// Chat-completion endpoint on a local port. The handler sees the parsed
/// request body and fills the response.
class MockServer {
 public:
  using Handler = std::function<void(const nlohmann::json& body, httplib::Response& res)>;

  explicit MockServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      {
        std::lock_guard lock(mutex_);
        requests_.push_back(body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      handler_(body, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  [[nodiscard]] std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  [[nodiscard]] std::vector<nlohmann::json> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  [[nodiscard]] std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mutex_);
    return auth_;
  }
  [[nodiscard]] int max_in_flight() const { return max_in_flight_; }

  static void reply(httplib::Response& res, const std::string& content) {
    const nlohmann::json j{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
                           {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}, {"total_tokens", 15}}}};
    res.set_content(j.dump(), "application/json");
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<nlohmann::json> requests_;
  std::vector<std::string> auth_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

}  // namespace ccx::testing
