#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <semaphore>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "targetlens/error.hpp"
#include "targetlens/provider.hpp"

namespace targetlens {

namespace {

constexpr std::ptrdiff_t kMaxInFlight = 256;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw ConfigError(fmt::format("live endpoint '{}' is not an http(s) URL", url));
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

std::chrono::milliseconds retry_after(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::chrono::milliseconds(0);
  try {
    return std::chrono::seconds(std::stoll(res->get_header_value("Retry-After")));
  } catch (const std::exception&) {
    return std::chrono::milliseconds(0);
  }
}

}  // namespace

struct LiveProvider::Impl {
  LiveProviderConfig config;
  Endpoint endpoint;
  std::string api_key;
  std::counting_semaphore<kMaxInFlight> slots;

  explicit Impl(LiveProviderConfig cfg)
      : config(std::move(cfg)),
        endpoint(parse_endpoint(config.endpoint)),
        slots(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(config.max_in_flight), 1,
                                         kMaxInFlight)) {}
};

LiveProvider::LiveProvider(LiveProviderConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& cfg = impl_->config;
  if (!cfg.api_key.empty()) {
    impl_->api_key = cfg.api_key;
  } else if (const char* env = std::getenv(cfg.api_key_env.c_str()); env && *env) {
    impl_->api_key = env;
  } else {
    throw ConfigError(
        fmt::format("live provider needs a credential in ${}", cfg.api_key_env));
  }
  if (cfg.max_in_flight == 0) throw ConfigError("live provider in-flight cap must be >= 1");
  if (!cfg.sleep) cfg.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

LiveProvider::~LiveProvider() = default;

CompletionResponse LiveProvider::complete(const CompletionRequest& request) {
  auto& impl = *impl_;
  impl.slots.acquire();
  struct Release {
    std::counting_semaphore<kMaxInFlight>& s;
    ~Release() { s.release(); }
  } release{impl.slots};

  nlohmann::json body = {{"model", request.model},
                         {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};
  for (const auto& [name, value] : request.params) body[name] = value;
  const std::string payload = body.dump();
  const httplib::Headers headers = {{"Authorization", "Bearer " + impl.api_key}};

  const auto start = std::chrono::steady_clock::now();
  std::string last_error;
  const auto& retry = impl.config.retry;
  for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("live provider retry {}/{} after: {}", attempt, retry.max_retries, last_error);
    }
    httplib::Client client(impl.endpoint.origin);
    client.set_connection_timeout(impl.config.timeout);
    client.set_read_timeout(impl.config.timeout);
    client.set_write_timeout(impl.config.timeout);
    auto res = client.Post(impl.endpoint.path, headers, payload, "application/json");

    std::chrono::milliseconds hinted{0};
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
    } else if (res->status >= 200 && res->status < 300) {
      try {
        const auto reply = nlohmann::json::parse(res->body);
        CompletionResponse out;
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        out.model = reply.value("model", request.model);
        out.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        out.provider = name();
        return out;
      } catch (const nlohmann::json::exception& e) {
        throw ProviderError(fmt::format("malformed completion response: {}", e.what()));
      }
    } else if (res->status == 401 || res->status == 403) {
      throw ProviderError(fmt::format("authentication failed (HTTP {})", res->status));
    } else if (is_transient_status(res->status)) {
      last_error = fmt::format("HTTP {}", res->status);
      hinted = retry_after(res);
    } else {
      throw ProviderError(fmt::format("HTTP {}: {}", res->status, res->body));
    }

    if (attempt < retry.max_retries) {
      impl.config.sleep(std::min(std::max(retry.backoff(attempt + 1), hinted), retry.max_backoff));
    }
  }
  throw ProviderError(fmt::format("live provider gave up after {} attempts: {}",
                                  retry.max_retries + 1, last_error));
}

}  // namespace targetlens
