#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "targetlens/error.hpp"
#include "targetlens/provider.hpp"
#include "test_support.hpp"

namespace targetlens {
namespace {

CompletionRequest req(std::string prompt, std::string model = "m") {
  return {std::move(model), std::move(prompt), {}};
}

TEST(RequestHash, DependsOnModelAndPrompt) {
  const auto h = request_hash(req("p"));
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(h, request_hash(req("p")));
  EXPECT_NE(h, request_hash(req("p", "other")));
  EXPECT_NE(h, request_hash(req("p ")));
  // No ambiguity between model and prompt boundaries.
  EXPECT_NE(request_hash(req("bc", "a")), request_hash(req("c", "ab")));
}

TEST(MockProvider, FirstMatchingRuleWins) {
  MockProvider mock({{"solar", "Label: male", std::nullopt},
                     {"sol", "Label: female", std::nullopt},
                     {"outage", std::nullopt, "service unavailable"}},
                    "Label: female");
  EXPECT_EQ(mock.complete(req("solar panels")).text, "Label: male");
  EXPECT_EQ(mock.complete(req("solstice")).text, "Label: female");
  EXPECT_EQ(mock.complete(req("anything")).text, "Label: female");
  EXPECT_EQ(mock.complete(req("x")).provider, "mock");
  EXPECT_THROW(mock.complete(req("grid outage")), ProviderError);
}

TEST(MockProvider, NoDefaultMeansError) {
  MockProvider mock({{"a", "b", std::nullopt}});
  EXPECT_THROW(mock.complete(req("zzz")), ProviderError);
}

TEST(MockProvider, RuleTableParsing) {
  auto mock = MockProvider::from_json(nlohmann::json::parse(
      R"({"rules": [{"match": "kids", "response": "Label: female"}], "default": "Label: male"})"));
  EXPECT_EQ(mock.complete(req("kids")).text, "Label: female");
  EXPECT_EQ(mock.complete(req("trucks")).text, "Label: male");
  EXPECT_THROW(MockProvider::from_json(nlohmann::json::parse(R"({"rules": [{"x": 1}]})")),
               ConfigError);
  EXPECT_THROW(MockProvider({{"a", "b", "c"}}), ConfigError);
  EXPECT_THROW(MockProvider::from_file("/nonexistent.json"), ConfigError);
}

TEST(Replay, ServesRecordedResponsesAndMissesLoudly) {
  auto store = std::make_shared<ReplayStore>();
  store->append({request_hash(req("p")), "m", "p", "Label: male\n", "2024-01-01T00:00:00Z"});
  ReplayProvider replay(store);
  auto response = replay.complete(req("p"));
  EXPECT_EQ(response.text, "Label: male\n");  // verbatim
  EXPECT_EQ(response.provider, "replay");
  EXPECT_THROW(replay.complete(req("q")), ReplayMissError);
  EXPECT_THROW(ReplayProvider(nullptr), ConfigError);
}

TEST(Replay, RecordsPassthroughToFile) {
  testing::TempDir dir;
  const auto path = dir / "store.jsonl";
  auto upstream = std::make_shared<MockProvider>(std::vector<MockRule>{}, "Label: female");
  {
    auto store = ReplayStore::open_for_recording(path);
    ReplayProvider recorder(store, upstream, [] { return std::string("2024-05-01T00:00:00Z"); });
    EXPECT_EQ(recorder.complete(req("first")).text, "Label: female");
    EXPECT_EQ(recorder.complete(req("first")).provider, "replay");  // second call is a hit
    EXPECT_EQ(store->size(), 1u);
  }
  auto reloaded = ReplayStore::load(path);
  ASSERT_EQ(reloaded->size(), 1u);
  const auto entry = reloaded->entries().front();
  EXPECT_EQ(entry.hash, request_hash(req("first")));
  EXPECT_EQ(entry.recorded_at, "2024-05-01T00:00:00Z");
  EXPECT_EQ(replay_entry_from_json(to_json(entry)), entry);
  ReplayProvider replay(reloaded);
  EXPECT_EQ(replay.complete(req("first")).text, "Label: female");
}

TEST(Replay, MalformedStoreIsAConfigError) {
  testing::TempDir dir;
  testing::write_file(dir / "bad.jsonl", "{\"hash\": 1\n");
  EXPECT_THROW(ReplayStore::load(dir / "bad.jsonl"), ConfigError);
  EXPECT_THROW(ReplayStore::load(dir / "missing.jsonl"), ConfigError);
}

TEST(Replay, ConcurrentReadsAreSafe) {
  auto store = std::make_shared<ReplayStore>();
  for (int i = 0; i < 64; ++i) {
    const auto p = "prompt " + std::to_string(i);
    store->append({request_hash(req(p)), "m", p, std::to_string(i), ""});
  }
  ReplayProvider replay(store);
  std::atomic<int> mismatches{0};
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        for (int i = 0; i < 64; ++i) {
          if (replay.complete(req("prompt " + std::to_string(i))).text != std::to_string(i)) {
            ++mismatches;
          }
        }
      });
    }
  }
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(RetryPolicy, ExponentialBackoffWithCap) {
  RetryPolicy policy;
  EXPECT_EQ(policy.backoff(1).count(), 1000);
  EXPECT_EQ(policy.backoff(2).count(), 2000);
  EXPECT_EQ(policy.backoff(3).count(), 4000);
  EXPECT_EQ(policy.backoff(10).count(), 30000);
  EXPECT_TRUE(is_transient_status(429));
  EXPECT_TRUE(is_transient_status(503));
  EXPECT_FALSE(is_transient_status(400));
  EXPECT_FALSE(is_transient_status(401));
}

TEST(LiveProvider, MissingCredentialIsAConfigError) {
  LiveProviderConfig config;
  config.api_key_env = "TARGETLENS_TEST_UNSET_VARIABLE";
  EXPECT_THROW(LiveProvider{config}, ConfigError);
  config.api_key = "k";
  config.endpoint = "ftp://example.com";
  EXPECT_THROW(LiveProvider{config}, ConfigError);
}

}  // namespace
}  // namespace targetlens
