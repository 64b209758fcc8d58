#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace targetlens {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  // Decoding parameters forwarded verbatim; empty means provider defaults.
  std::map<std::string, nlohmann::json> params;
};

struct CompletionResponse {
  std::string text;  // verbatim, never trimmed
  std::string model;
  double latency_ms = 0.0;
  std::string provider;
};

// Stable digest of (model, rendered prompt); keys the replay store.
std::string request_hash(const CompletionRequest& request);

// Completion backend. Implementations are safe to call from several threads.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Mock: first rule whose `match` is a substring of the prompt wins. A rule may
// answer with text or fail with a provider error.

struct MockRule {
  std::string match;
  std::optional<std::string> response;
  std::optional<std::string> error;
};

class MockProvider : public Provider {
 public:
  explicit MockProvider(std::vector<MockRule> rules,
                        std::optional<std::string> default_response = std::nullopt);

  // {"rules": [{"match": "...", "response": "..."} | {"match": "...", "error": "..."}],
  //  "default": "..."}
  static MockProvider from_file(const std::filesystem::path& path);
  static MockProvider from_json(const nlohmann::json& j);

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string name() const override { return "mock"; }

 private:
  std::vector<MockRule> rules_;
  std::optional<std::string> default_;
};

// ---------------------------------------------------------------------------
// Record/replay.

struct ReplayEntry {
  std::string hash;
  std::string model;
  std::string prompt;
  std::string response;
  std::string recorded_at;  // ISO 8601

  bool operator==(const ReplayEntry&) const = default;
};

nlohmann::ordered_json to_json(const ReplayEntry& entry);
ReplayEntry replay_entry_from_json(const nlohmann::json& j);

// JSONL-backed map from request hash to response. Appends are serialized and,
// when the store is bound to a file, written through immediately.
class ReplayStore {
 public:
  ReplayStore() = default;

  static std::shared_ptr<ReplayStore> load(const std::filesystem::path& path);
  // Loads `path` if it exists (or starts empty) and appends new entries to it.
  static std::shared_ptr<ReplayStore> open_for_recording(const std::filesystem::path& path);

  std::optional<ReplayEntry> find(const std::string& hash) const;
  void append(ReplayEntry entry);
  std::size_t size() const;
  std::vector<ReplayEntry> entries() const;  // insertion order

  void write(std::ostream& out) const;

 private:
  mutable std::mutex mutex_;
  std::vector<ReplayEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::filesystem::path> sink_;
};

class ReplayProvider : public Provider {
 public:
  // With `passthrough`, misses go to that provider and the answer is recorded.
  explicit ReplayProvider(std::shared_ptr<ReplayStore> store,
                          std::shared_ptr<Provider> passthrough = nullptr,
                          std::function<std::string()> clock = nullptr);

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string name() const override { return "replay"; }

  const ReplayStore& store() const { return *store_; }

 private:
  std::shared_ptr<ReplayStore> store_;
  std::shared_ptr<Provider> passthrough_;
  std::function<std::string()> clock_;
};

// ---------------------------------------------------------------------------
// Live chat-completion endpoint.

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  // Delay before retry number `attempt` (1-based).
  std::chrono::milliseconds backoff(int attempt) const;
};

// True for statuses worth retrying: 408, 429 and 5xx gateway/server errors.
bool is_transient_status(int status) noexcept;

struct LiveProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "TARGETLENS_API_KEY";
  // Overrides the environment variable when nonempty.
  std::string api_key;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  std::size_t max_in_flight = 4;
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class LiveProvider : public Provider {
 public:
  // Resolves the credential eagerly; ConfigError when it is missing.
  explicit LiveProvider(LiveProviderConfig config);
  ~LiveProvider() override;

  LiveProvider(const LiveProvider&) = delete;
  LiveProvider& operator=(const LiveProvider&) = delete;

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string name() const override { return "live"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace targetlens
