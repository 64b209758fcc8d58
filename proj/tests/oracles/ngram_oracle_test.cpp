#include <gtest/gtest.h>

#include "oracles.hpp"
#include "targetlens/ngrams.hpp"

namespace targetlens {
namespace {

std::string serialize(const NgramTable& table) {
  std::string out;
  for (const auto& e : table.entries) out += join_ngram(e.ngram) + "\t" + std::to_string(e.count) + "\n";
  return out;
}

TEST(NgramOracle, TopKMatchesBruteForceOnRandomCorpora) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick_k(1, 10);
  for (int corpus_index = 0; corpus_index < 100; ++corpus_index) {
    const auto corpus = oracle::random_corpus(rng);
    for (int order : {2, 3}) {
      const std::size_t k = pick_k(rng);
      SCOPED_TRACE("corpus " + std::to_string(corpus_index) + " order " + std::to_string(order) +
                   " k " + std::to_string(k));
      const auto expected = oracle::brute_force_top_k(corpus.documents, order, k);
      const auto from_tokens = top_k(count_ngrams(corpus.documents, order), order, k);
      const auto from_text = top_k_ngrams(corpus.texts, order, k);
      EXPECT_EQ(serialize(from_tokens), oracle::serialize(expected.entries));
      EXPECT_EQ(serialize(from_text), oracle::serialize(expected.entries));
      EXPECT_EQ(from_text.total_windows, expected.total_windows);
    }
  }
}

TEST(NgramOracle, FullCountsMatchBruteForce) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    const auto corpus = oracle::random_corpus(rng);
    const auto all = oracle::brute_force_top_k(corpus.documents, 2, SIZE_MAX);
    const auto counts = count_ngrams(corpus.documents, 2);
    ASSERT_EQ(counts.size(), all.entries.size());
    for (const auto& e : all.entries) ASSERT_EQ(counts.at(e.ngram), e.count);
  }
}

}  // namespace
}  // namespace targetlens
