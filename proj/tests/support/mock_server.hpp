#pragma once

#include <httplib.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace targetlens::testing {

// Chat-completion endpoint on 127.0.0.1 with a scripted handler.
class MockChatServer {
 public:
  struct Seen {
    std::string authorization;
    std::string body;
  };
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit MockChatServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      int call = 0;
      {
        std::lock_guard lock(mutex_);
        seen_.push_back({req.get_header_value("Authorization"), req.body});
        call = static_cast<int>(seen_.size());
      }
      handler_(req, res, call);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockChatServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  std::vector<Seen> seen() const {
    std::lock_guard lock(mutex_);
    return seen_;
  }

  static std::string completion(const std::string& content, const std::string& model = "mock") {
    nlohmann::json j = {{"model", model},
                        {"choices", {{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", content}}}}}}};
    return j.dump();
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<Seen> seen_;
};

}  // namespace targetlens::testing
