#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "targetlens/digest.hpp"
#include "targetlens/error.hpp"
#include "targetlens/provider.hpp"

namespace targetlens {

namespace {

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string request_hash(const CompletionRequest& request) {
  std::string material = request.model;
  material.push_back('\0');
  material += request.prompt;
  return sha256_hex(material);
}

// --- mock ---------------------------------------------------------------------

MockProvider::MockProvider(std::vector<MockRule> rules, std::optional<std::string> default_response)
    : rules_(std::move(rules)), default_(std::move(default_response)) {
  for (const auto& rule : rules_) {
    if (rule.response.has_value() == rule.error.has_value()) {
      throw ConfigError(fmt::format(
          "mock rule '{}' needs exactly one of 'response' or 'error'", rule.match));
    }
  }
}

MockProvider MockProvider::from_json(const nlohmann::json& j) {
  std::vector<MockRule> rules;
  try {
    for (const auto& r : j.at("rules")) {
      MockRule rule;
      rule.match = r.at("match").get<std::string>();
      if (r.contains("response")) rule.response = r.at("response").get<std::string>();
      if (r.contains("error")) rule.error = r.at("error").get<std::string>();
      rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed mock rule table: {}", e.what()));
  }
  std::optional<std::string> fallback;
  if (auto it = j.find("default"); it != j.end() && it->is_string()) {
    fallback = it->get<std::string>();
  }
  return MockProvider(std::move(rules), std::move(fallback));
}

MockProvider MockProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open mock rule table '{}'", path.string()));
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("mock rule table '{}': {}", path.string(), e.what()));
  }
}

CompletionResponse MockProvider::complete(const CompletionRequest& request) {
  for (const auto& rule : rules_) {
    if (request.prompt.find(rule.match) == std::string::npos) continue;
    if (rule.error) throw ProviderError(*rule.error);
    return {*rule.response, request.model, 0.0, name()};
  }
  if (default_) return {*default_, request.model, 0.0, name()};
  throw ProviderError("mock provider has no rule matching the prompt");
}

// --- replay -------------------------------------------------------------------

nlohmann::ordered_json to_json(const ReplayEntry& entry) {
  return {{"hash", entry.hash},
          {"model", entry.model},
          {"prompt", entry.prompt},
          {"response", entry.response},
          {"recorded_at", entry.recorded_at}};
}

ReplayEntry replay_entry_from_json(const nlohmann::json& j) {
  return {j.at("hash").get<std::string>(), j.at("model").get<std::string>(),
          j.at("prompt").get<std::string>(), j.at("response").get<std::string>(),
          j.value("recorded_at", std::string())};
}

std::shared_ptr<ReplayStore> ReplayStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open replay store '{}'", path.string()));
  auto store = std::make_shared<ReplayStore>();
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      store->append(replay_entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(
          fmt::format("replay store '{}' line {}: {}", path.string(), row, e.what()));
    }
  }
  return store;
}

std::shared_ptr<ReplayStore> ReplayStore::open_for_recording(const std::filesystem::path& path) {
  auto store = std::filesystem::exists(path) ? load(path) : std::make_shared<ReplayStore>();
  store->sink_ = path;
  return store;
}

std::optional<ReplayEntry> ReplayStore::find(const std::string& hash) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(hash);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

void ReplayStore::append(ReplayEntry entry) {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(entry.hash); it != index_.end()) {
    entries_[it->second] = entry;
  } else {
    index_.emplace(entry.hash, entries_.size());
    entries_.push_back(entry);
  }
  if (sink_) {
    std::ofstream out(*sink_, std::ios::app | std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot append to replay store '{}'", sink_->string()));
    out << to_json(entry).dump() << '\n';
  }
}

std::size_t ReplayStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<ReplayEntry> ReplayStore::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

void ReplayStore::write(std::ostream& out) const {
  std::lock_guard lock(mutex_);
  for (const auto& entry : entries_) out << to_json(entry).dump() << '\n';
}

ReplayProvider::ReplayProvider(std::shared_ptr<ReplayStore> store,
                               std::shared_ptr<Provider> passthrough,
                               std::function<std::string()> clock)
    : store_(std::move(store)),
      passthrough_(std::move(passthrough)),
      clock_(clock ? std::move(clock) : utc_now_iso8601) {
  if (!store_) throw ConfigError("replay provider needs a loaded store");
}

CompletionResponse ReplayProvider::complete(const CompletionRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const std::string hash = request_hash(request);
  if (auto hit = store_->find(hash)) {
    return {hit->response, hit->model, elapsed_ms(start), name()};
  }
  if (!passthrough_) throw ReplayMissError(hash);
  CompletionResponse live = passthrough_->complete(request);
  store_->append({hash, request.model, request.prompt, live.text, clock_()});
  return live;
}

// --- retry policy -----------------------------------------------------------------

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  double delay = static_cast<double>(initial_backoff.count());
  for (int i = 1; i < attempt; ++i) delay *= multiplier;
  const double cap = static_cast<double>(max_backoff.count());
  return std::chrono::milliseconds(static_cast<long long>(delay < cap ? delay : cap));
}

bool is_transient_status(int status) noexcept {
  return status == 408 || status == 429 || status == 500 || status == 502 || status == 503 ||
         status == 504;
}

}  // namespace targetlens
